#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "tumseg/metrics.hpp"

using namespace tumseg;
namespace fs = std::filesystem;

namespace {

GridU8 mask_from(Dims3 d, const std::vector<std::array<int, 3>> &voxels) {
  GridU8 g(d);
  for (const auto &v : voxels)
    g(v[0], v[1], v[2]) = 1;
  return g;
}

} // namespace

TEST_CASE("region and metric names") {
  CHECK(std::string(region_name(SubRegion::ET)) == "ET");
  CHECK(std::string(region_name(SubRegion::TC)) == "TC");
  CHECK(std::string(region_name(SubRegion::WT)) == "WT");
  CHECK(std::string(metric_name(0)) == "dice");
  CHECK(std::string(metric_name(1)) == "sensitivity");
  CHECK(std::string(metric_name(2)) == "specificity");
  CHECK(std::string(metric_name(3)) == "h95");
}

TEST_CASE("sub-region masks nest like onion shells") {
  const Dims3 d{6, 5, 4};
  LabelVolume lv(d);
  lv.labels(1, 1, 1) = kEnhancing;
  lv.labels(2, 1, 1) = kNcrNet;
  lv.labels(3, 1, 1) = kEdema;

  const RegionMasks rm = compose_subregions(lv);
  CHECK(rm.et.array().cast<int>().sum() == 1);
  CHECK(rm.tc.array().cast<int>().sum() == 2);
  CHECK(rm.wt.array().cast<int>().sum() == 3);
  CHECK(rm.et(1, 1, 1) == 1);
  CHECK(rm.tc(1, 1, 1) == 1);
  CHECK(rm.tc(2, 1, 1) == 1);
  CHECK(rm.wt(3, 1, 1) == 1);
  CHECK(rm.et(3, 1, 1) == 0);

  // Nesting holds on random volumes.
  for (int trial = 0; trial < 5; ++trial) {
    const LabelVolume rand_lv =
        testutil::random_label_volume({12, 10, 8}, 50 + trial);
    const RegionMasks masks = compose_subregions(rand_lv);
    for (std::size_t i = 0; i < masks.et.size(); ++i) {
      CHECK(masks.et[i] <= masks.tc[i]);
      CHECK(masks.tc[i] <= masks.wt[i]);
    }
  }

  LabelVolume bad(d);
  bad.labels(0, 0, 0) = 4; // not an internal code
  CHECK_THROWS_AS(compose_subregions(bad), UnknownLabel);
}

TEST_CASE("confusion counts on a hand-worked example") {
  const Dims3 d{8, 1, 1};
  GridU8 pred(d), truth(d);
  // pred marks x = 0,1,2; truth marks x = 0,1,3.
  pred(0, 0, 0) = pred(1, 0, 0) = pred(2, 0, 0) = 1;
  truth(0, 0, 0) = truth(1, 0, 0) = truth(3, 0, 0) = 1;

  const RegionMetrics m = confusion_metrics(pred, truth);
  CHECK(m.counts.tp == 2);
  CHECK(m.counts.fp == 1);
  CHECK(m.counts.fn == 1);
  CHECK(m.counts.tn == 4);
  CHECK(m.counts.tp + m.counts.fp + m.counts.fn + m.counts.tn == 8);
  CHECK(m.dice == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(m.sensitivity == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(m.specificity == doctest::Approx(4.0 / 5.0).epsilon(1e-12));
}

TEST_CASE("empty-mask conventions") {
  const Dims3 d{4, 4, 4};
  const GridU8 empty(d);
  GridU8 full(d);
  for (std::size_t i = 0; i < full.size(); ++i)
    full[i] = 1;
  GridU8 one(d);
  one(0, 0, 0) = 1;

  SUBCASE("both empty: perfect scores") {
    const RegionMetrics m = confusion_metrics(empty, empty);
    CHECK(m.dice == 1.0);
    CHECK(m.sensitivity == 1.0);
    CHECK(m.specificity == 1.0);
  }
  SUBCASE("empty truth, nonempty prediction") {
    const RegionMetrics m = confusion_metrics(one, empty);
    CHECK(m.dice == 0.0);
    CHECK(m.sensitivity == 1.0); // no positives to find
    CHECK(m.specificity < 1.0);
  }
  SUBCASE("everything foreground: specificity convention") {
    const RegionMetrics m = confusion_metrics(full, full);
    CHECK(m.dice == 1.0);
    CHECK(m.sensitivity == 1.0);
    CHECK(m.specificity == 1.0); // no negatives to reject
  }
  SUBCASE("shape mismatch") {
    CHECK_THROWS_AS(confusion_metrics(empty, GridU8(Dims3{3, 3, 3})),
                    ShapeMismatch);
  }
}

TEST_CASE("boundary-distance fixtures") {
  const Dims3 d{16, 16, 16};

  SUBCASE("identical masks score zero") {
    const GridU8 m = testutil::random_mask(d, 3);
    CHECK(hausdorff95(m, m) == 0.0);
  }

  SUBCASE("both empty scores zero") {
    const GridU8 empty(d);
    CHECK(hausdorff95(empty, empty) == 0.0);
  }

  SUBCASE("one empty scores the full-grid diagonal") {
    GridU8 one(d);
    one(8, 8, 8) = 1;
    const GridU8 empty(d);
    const double diag = std::sqrt(3.0) * 16.0;
    CHECK(hausdorff95(one, empty) == doctest::Approx(diag).epsilon(1e-12));
    CHECK(hausdorff95(empty, one) == doctest::Approx(diag).epsilon(1e-12));
    // Clinical grid: 240x240x155 at 1 mm.
    GridU8 big(Dims3{240, 240, 155});
    big(0, 0, 0) = 1;
    CHECK(hausdorff95(GridU8(Dims3{240, 240, 155}), big) ==
          doctest::Approx(373.1286641).epsilon(1e-9));
  }

  SUBCASE("two single voxels five apart") {
    const GridU8 a = mask_from(d, {{2, 3, 4}});
    const GridU8 b = mask_from(d, {{7, 3, 4}});
    CHECK(hausdorff95(a, b) == doctest::Approx(5.0).epsilon(1e-12));
  }

  SUBCASE("anisotropic voxels scale the distance") {
    const GridU8 a = mask_from(d, {{2, 3, 4}});
    const GridU8 b = mask_from(d, {{2, 3, 5}});
    CHECK(hausdorff95(a, b, {1.0, 1.0, 10.0}) ==
          doctest::Approx(10.0).epsilon(1e-12));
  }

  SUBCASE("the 95th percentile shrugs off a handful of outliers") {
    // Hollowing one voxel out of a 7^3 cube adds six interior boundary
    // voxels at distance 2 from the outer faces. Six outliers among ~440
    // pooled distances sit above the 95th percentile, so the score stays 0
    // even though the maximum boundary distance is 2.
    GridU8 solid(d), hollow(d);
    for (int z = 4; z <= 10; ++z)
      for (int y = 4; y <= 10; ++y)
        for (int x = 4; x <= 10; ++x) {
          solid(x, y, z) = 1;
          hollow(x, y, z) = 1;
        }
    hollow(7, 7, 7) = 0;
    CHECK(hausdorff95(solid, hollow) == 0.0);
    CHECK(hausdorff95(solid, hollow) ==
          doctest::Approx(testutil::brute_h95(solid, hollow)));
  }
}

TEST_CASE("boundary distance agrees with the all-pairs oracle") {
  for (int trial = 0; trial < 12; ++trial) {
    const Dims3 d{int(8 + (trial % 3) * 6), 16, 12};
    const GridU8 pred = testutil::random_mask(d, 100 + trial);
    const GridU8 truth = testutil::random_mask(d, 200 + trial);
    const std::array<double, 3> vox{1.0, 1.25, 2.0};
    const double fast = hausdorff95(pred, truth, vox);
    const double slow = testutil::brute_h95(pred, truth, vox);
    CHECK(fast == doctest::Approx(slow).epsilon(1e-9));
  }
}

TEST_CASE("subject evaluation of a perfect prediction") {
  const LabelVolume lv = testutil::random_label_volume({14, 12, 10}, 9);
  MetricsReport rep = evaluate_subject(lv, lv);
  rep.subject = "case0";
  for (int r = 0; r < kNumRegions; ++r) {
    CHECK(rep.regions[r].dice == 1.0);
    CHECK(rep.regions[r].sensitivity == 1.0);
    CHECK(rep.regions[r].specificity == 1.0);
    CHECK(rep.regions[r].h95_mm == 0.0);
  }
}

TEST_CASE("subject evaluation matches region-wise recomputation") {
  const LabelVolume pred = testutil::random_label_volume({14, 12, 10}, 21);
  const LabelVolume truth = testutil::random_label_volume({14, 12, 10}, 22);
  const MetricsReport rep = evaluate_subject(pred, truth);
  const RegionMasks pm = compose_subregions(pred);
  const RegionMasks tm = compose_subregions(truth);
  const GridU8 *pms[3] = {&pm.et, &pm.tc, &pm.wt};
  const GridU8 *tms[3] = {&tm.et, &tm.tc, &tm.wt};
  for (int r = 0; r < 3; ++r) {
    const RegionMetrics direct = confusion_metrics(*pms[r], *tms[r]);
    CHECK(rep.regions[r].dice == direct.dice);
    CHECK(rep.regions[r].sensitivity == direct.sensitivity);
    CHECK(rep.regions[r].specificity == direct.specificity);
    CHECK(rep.regions[r].h95_mm ==
          doctest::Approx(hausdorff95(*pms[r], *tms[r])).epsilon(1e-12));
  }
}

TEST_CASE("aggregation reproduces textbook summary statistics") {
  std::vector<MetricsReport> reports(4);
  const double dice_et[4] = {0.8, 0.9, 1.0, 0.9};
  const double h95_wt[4] = {1.0, 2.0, 3.0, 4.0};
  for (int i = 0; i < 4; ++i) {
    reports[i].subject = "s" + std::to_string(i);
    reports[i].regions[int(SubRegion::ET)].dice = dice_et[i];
    reports[i].regions[int(SubRegion::WT)].h95_mm = h95_wt[i];
  }
  const AggregateStats agg = aggregate(reports);

  const Stats &et_dice = agg.at(SubRegion::ET, 0);
  CHECK(et_dice.mean == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(et_dice.stddev ==
        doctest::Approx(std::sqrt(0.02 / 3.0)).epsilon(1e-12));
  CHECK(et_dice.median == doctest::Approx(0.9).epsilon(1e-12));

  const Stats &wt_h95 = agg.at(SubRegion::WT, 3);
  CHECK(wt_h95.mean == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(wt_h95.q25 == doctest::Approx(1.75).epsilon(1e-12));
  CHECK(wt_h95.q75 == doctest::Approx(3.25).epsilon(1e-12));
  CHECK(wt_h95.median == doctest::Approx(2.5).epsilon(1e-12));

  // A single report has zero spread.
  const AggregateStats single = aggregate({reports[0]});
  CHECK(single.at(SubRegion::ET, 0).stddev == 0.0);
  CHECK(single.at(SubRegion::ET, 0).mean == 0.8);

  CHECK_THROWS_AS(aggregate({}), EmptyList);
}

TEST_CASE("metric CSV files have the documented layout") {
  std::vector<MetricsReport> reports(2);
  reports[0].subject = "alpha";
  reports[1].subject = "beta";
  reports[0].regions[0].dice = 0.5;
  const AggregateStats agg = aggregate(reports);

  const fs::path dir = fs::temp_directory_path() / "tumseg_metrics_tests";
  fs::create_directories(dir);

  const fs::path per_subject = dir / "metrics.csv";
  write_metrics_csv(per_subject.string(), reports);
  std::ifstream in(per_subject);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line))
    lines.push_back(line);
  REQUIRE(lines.size() == 1 + 2 * 3); // header + 3 regions per subject
  CHECK(lines[0] == "subject,region,dice,sensitivity,specificity,h95");
  CHECK(lines[1].rfind("alpha,ET,0.5,", 0) == 0);
  CHECK(lines[4].rfind("beta,ET,", 0) == 0);

  const fs::path agg_path = dir / "aggregate.csv";
  write_aggregate_csv(agg_path.string(), agg);
  std::ifstream in2(agg_path);
  lines.clear();
  while (std::getline(in2, line))
    lines.push_back(line);
  REQUIRE(lines.size() == 1 + 3 * 4); // header + 4 metrics per region
  CHECK(lines[0] == "region,metric,mean,std,median,q25,q75");
  CHECK(lines[1].rfind("ET,dice,", 0) == 0);
  CHECK(lines[2].rfind("ET,sensitivity,", 0) == 0);
  CHECK(lines[12].rfind("WT,h95,", 0) == 0);

  CHECK_THROWS_AS(write_metrics_csv((dir / "nodir" / "m.csv").string(),
                                    reports),
                  IoFailure);
}
