#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

// End-to-end acceptance checks. Each test prints one PASS/FAIL line so the
// run can be audited from the log alone; the assertions then gate ctest.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <tumseg/ensemble.hpp>
#include <tumseg/experiment.hpp>
#include <tumseg/folds.hpp>
#include <tumseg/loss.hpp>
#include <tumseg/metrics.hpp>
#include <tumseg/nifti.hpp>
#include <tumseg/phantom.hpp>
#include <tumseg/planes.hpp>
#include <tumseg/postproc.hpp>
#include <tumseg/stats.hpp>
#include <tumseg/train.hpp>
#include <tumseg/unet.hpp>
#include <tumseg/volume.hpp>

#include "helpers.hpp"

namespace fs = std::filesystem;
using namespace tumseg;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void report(int idx, const char *what, bool ok, const std::string &detail) {
  std::ostringstream line;
  line << "[acceptance " << idx << "] " << what << ": "
       << (ok ? "PASS" : "FAIL");
  if (!detail.empty())
    line << " (" << detail << ")";
  std::puts(line.str().c_str());
  std::fflush(stdout);
}

template <typename S>
Tensor4<S> random_inputs(int n, int c, int h, int w, std::uint64_t seed) {
  Tensor4<S> t(n, c, h, w);
  Rng rng(seed);
  for (Eigen::Index i = 0; i < t.array().size(); ++i)
    t.array()[i] = S(rng.normal());
  return t;
}

TargetArr random_targets(int n, int classes, int h, int w,
                         std::uint64_t seed) {
  TargetArr t(n, classes, h, w);
  Rng rng(seed);
  for (Eigen::Index i = 0; i < t.labels.size(); ++i)
    t.labels[i] = std::uint8_t(rng.uniform_int(0, classes - 1));
  return t;
}

fs::path fresh_dir(const std::string &name) {
  const fs::path dir =
      fs::temp_directory_path() / "tumseg_acceptance" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

bool label_grids_equal(const GridU8 &a, const GridU8 &b) {
  if (!(a.dims() == b.dims()))
    return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i])
      return false;
  return true;
}

} // namespace

TEST_CASE("1: analytic gradients match finite differences") {
  const auto t0 = Clock::now();
  UNetConfig cfg;
  cfg.base_width = 4;
  cfg.in_channels = 4;
  cfg.num_classes = 4;
  cfg.seed = 1;
  auto params = init_params<double>(cfg);
  // Jitter the zero-initialised biases: they put ReLU pre-activations of
  // all-zero upsampled patches exactly on the kink, where central
  // differences measure the average of two one-sided slopes.
  Rng jitter(2);
  visit_layers(params, [&](const char *, ConvParam<double> &l) {
    for (Eigen::Index i = 0; i < l.b.size(); ++i)
      l.b[i] += jitter.normal(0.0, 0.05);
  });
  Batch2D<double> batch;
  batch.inputs = random_inputs<double>(2, 4, 16, 16, 3);
  batch.targets = random_targets(2, 4, 16, 16, 4);

  const GradCheckReport rep = grad_check(params, batch, 240);
  const double secs = seconds_since(t0);
  const bool ok =
      rep.num_checked >= 200 && rep.max_rel_error < 1e-4 && secs < 60.0;

  std::ostringstream detail;
  detail << "max rel err " << rep.max_rel_error << " over " << rep.num_checked
         << " params, " << secs << "s";
  report(1, "gradients vs central finite differences", ok, detail.str());
  CHECK(rep.num_checked >= 200);
  CHECK(rep.max_rel_error < 1e-4);
  CHECK(secs < 60.0);
}

TEST_CASE("2: overlap metrics and boundary distance match oracles") {
  const auto t0 = Clock::now();

  bool overlap_ok = true;
  for (int trial = 0; trial < 100; ++trial) {
    const Dims3 d{16, 16, 16};
    const LabelVolume pred =
        testutil::random_label_volume(d, 1000 + 2 * trial);
    const LabelVolume truth =
        testutil::random_label_volume(d, 1001 + 2 * trial);
    const MetricsReport rep = evaluate_subject(pred, truth);

    for (int r = 0; r < kNumRegions; ++r) {
      const auto in_region = [r](std::uint8_t v) {
        switch (SubRegion(r)) {
        case SubRegion::ET:
          return v == kEnhancing;
        case SubRegion::TC:
          return v == kEnhancing || v == kNcrNet;
        default:
          return v != kBackground;
        }
      };
      std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
      for (std::size_t i = 0; i < pred.labels.size(); ++i) {
        const bool p = in_region(pred.labels[i]);
        const bool t = in_region(truth.labels[i]);
        tp += p && t;
        fp += p && !t;
        fn += !p && t;
        tn += !p && !t;
      }
      const double dice =
          (tp + fp + fn) == 0 ? 1.0 : 2.0 * tp / double(2 * tp + fp + fn);
      const double sens = (tp + fn) == 0 ? 1.0 : tp / double(tp + fn);
      const double spec = (tn + fp) == 0 ? 1.0 : tn / double(tn + fp);
      overlap_ok = overlap_ok && rep.regions[r].dice == dice &&
                   rep.regions[r].sensitivity == sens &&
                   rep.regions[r].specificity == spec;
    }
  }

  bool h95_ok = true;
  double worst_h95_diff = 0.0;
  const Dims3 dims_cycle[5] = {
      {16, 16, 16}, {24, 24, 24}, {20, 16, 24}, {24, 20, 16}, {12, 24, 20}};
  const std::array<double, 3> vox_cycle[5] = {
      {1, 1, 1}, {1, 1, 1}, {0.5, 2, 1}, {1, 1.25, 2}, {2, 2, 2}};
  for (int trial = 0; trial < 50; ++trial) {
    const Dims3 d = dims_cycle[trial % 5];
    const auto vox = vox_cycle[trial % 5];
    const GridU8 a = testutil::random_mask(d, 7000 + 2 * trial);
    const GridU8 b = testutil::random_mask(d, 7001 + 2 * trial);
    const double got = hausdorff95(a, b, vox);
    const double want = testutil::brute_h95(a, b, vox);
    worst_h95_diff = std::max(worst_h95_diff, std::abs(got - want));
    h95_ok = h95_ok && std::abs(got - want) < 1e-9;
  }

  const double secs = seconds_since(t0);
  const bool ok = overlap_ok && h95_ok && secs < 60.0;
  std::ostringstream detail;
  detail << "100 exact overlap volumes, 50 boundary pairs within "
         << worst_h95_diff << " mm, " << secs << "s";
  report(2, "metrics vs independent voxel-count and all-pairs oracles", ok,
         detail.str());
  CHECK(overlap_ok);
  CHECK(h95_ok);
  CHECK(secs < 60.0);
}

TEST_CASE("3: empty prediction against the clinical grid diagonal") {
  const Dims3 d{240, 240, 155};
  LabelVolume pred(d), truth(d);
  for (int z = 70; z < 90; ++z)
    for (int y = 100; y < 130; ++y)
      for (int x = 100; x < 130; ++x) {
        truth.labels(x, y, z) = kEdema;
        if (x < 120 && y < 120)
          truth.labels(x, y, z) = kNcrNet;
        if (x < 112 && y < 112)
          truth.labels(x, y, z) = kEnhancing;
      }

  const MetricsReport rep = evaluate_subject(pred, truth);
  bool ok = true;
  for (int r = 0; r < kNumRegions; ++r) {
    ok = ok && rep.regions[r].dice == 0.0;
    ok = ok && std::abs(rep.regions[r].h95_mm - 373.13) <= 0.01;
  }
  std::ostringstream detail;
  detail << "H95 " << rep.regions[int(SubRegion::WT)].h95_mm
         << " mm, dice " << rep.regions[int(SubRegion::WT)].dice;
  report(3, "empty prediction yields full-grid diagonal and zero dice", ok,
         detail.str());
  for (int r = 0; r < kNumRegions; ++r) {
    CHECK(rep.regions[r].dice == 0.0);
    CHECK(rep.regions[r].h95_mm == doctest::Approx(373.13).epsilon(0.0001));
  }
}

TEST_CASE("4: slicing, cropping, and file IO round trips") {
  // (a) extract -> assemble is the identity on every plane
  bool planes_ok = true;
  {
    const Dims3 d{24, 16, 12};
    MultiModalVolume vol(d);
    Rng rng(41);
    for (int m = 0; m < kModalities; ++m)
      for (std::size_t i = 0; i < vol.mod[m].size(); ++i)
        vol.mod[m][i] = float(rng.uniform01());
    for (Plane plane : {Plane::Axial, Plane::Sagittal, Plane::Coronal}) {
      const SliceStack stack = extract_slices(vol, plane);
      const ProbVolume back = assemble_probs(stack, plane);
      planes_ok = planes_ok && back.num_classes() == kModalities;
      for (int m = 0; m < kModalities; ++m)
        for (std::size_t i = 0; i < vol.mod[m].size(); ++i)
          planes_ok = planes_ok && back.prob[m][i] == vol.mod[m][i];
    }
  }

  // (b) uncrop(crop) restores labels exactly when they sit on the head
  bool crop_ok = true;
  {
    const Dims3 d{240, 240, 155};
    MultiModalVolume vol(d);
    LabelVolume labels(d);
    Rng rng(42);
    for (int z = 10; z < 150; ++z)
      for (int y = 60; y < 180; ++y)
        for (int x = 60; x < 180; ++x) {
          vol.mod[kFlair](x, y, z) = float(1.0 + rng.uniform01());
          labels.labels(x, y, z) = std::uint8_t(rng.uniform_int(0, 3));
        }
    const CropResult res = crop_to_standard(vol, &labels);
    crop_ok = res.labels.has_value();
    if (crop_ok) {
      const LabelVolume restored = uncrop(*res.labels, res.spec);
      crop_ok = restored.dims() == d &&
                label_grids_equal(restored.labels, labels.labels);
    }
  }

  // (c) float32 and uint8 volumes survive a write/read cycle bit-exactly
  bool io_ok = true;
  {
    const fs::path dir = fresh_dir("roundtrip");
    const Dims3 d{9, 7, 5};
    GridF gf(d);
    GridU8 gu(d);
    Rng rng(43);
    for (std::size_t i = 0; i < gf.size(); ++i) {
      gf[i] = float(rng.normal());
      gu[i] = std::uint8_t(rng.uniform_int(0, 255));
    }
    const std::array<float, 3> vox{1.0f, 1.25f, 2.0f};
    nifti_write((dir / "f.nii").string(), gf, vox);
    nifti_write((dir / "u.nii").string(), gu, vox);
    const NiftiVolume bf = nifti_read((dir / "f.nii").string());
    const NiftiVolume bu = nifti_read((dir / "u.nii").string());
    io_ok = bf.data.dims() == d && bu.data.dims() == d;
    for (std::size_t i = 0; io_ok && i < gf.size(); ++i)
      io_ok = bf.data[i] == gf[i] && bu.data[i] == float(gu[i]);
    for (int k = 0; k < 3; ++k)
      io_ok = io_ok && bf.voxel_mm[k] == vox[k] && bu.voxel_mm[k] == vox[k];
  }

  const bool ok = planes_ok && crop_ok && io_ok;
  std::ostringstream detail;
  detail << "planes " << (planes_ok ? "ok" : "BAD") << ", crop "
         << (crop_ok ? "ok" : "BAD") << ", file io "
         << (io_ok ? "ok" : "BAD");
  report(4, "extract/assemble, crop/uncrop, and volume IO round trips", ok,
         detail.str());
  CHECK(planes_ok);
  CHECK(crop_ok);
  CHECK(io_ok);
}

TEST_CASE("5: post-processing invariants over randomized volumes") {
  const auto t0 = Clock::now();
  const Dims3 d{20, 20, 20};
  bool min_volume_ok = true, tc_ok = true, interface_ok = true,
       idempotent_ok = true;

  for (int trial = 0; trial < 500; ++trial) {
    const LabelVolume in =
        testutil::random_label_volume(d, 5000 + 3 * trial, 6, 40);
    const bool with_tc = trial % 2 == 1;
    TCMask tc;
    if (with_tc)
      tc.mask = testutil::random_mask(d, 5001 + 3 * trial);
    const LabelVolume out = with_tc ? postprocess(in, tc) : postprocess(in);

    // (a) no enhancing component below the volume threshold survives
    GridU8 et(d);
    for (std::size_t i = 0; i < out.labels.size(); ++i)
      et[i] = out.labels[i] == kEnhancing;
    for (const Component &comp : connected_components(et, 26))
      min_volume_ok = min_volume_ok && !(comp.volume_mm3 < kMinEtVolumeMm3);

    // (b) every core-mask voxel carries a core class
    if (with_tc)
      for (std::size_t i = 0; i < out.labels.size(); ++i)
        if (tc.mask[i])
          tc_ok = tc_ok && (out.labels[i] == kEnhancing ||
                            out.labels[i] == kNcrNet);

    // (c) no background voxel touches both a core class and edema
    for (int z = 0; z < d.z; ++z)
      for (int y = 0; y < d.y; ++y)
        for (int x = 0; x < d.x; ++x) {
          if (out.labels(x, y, z) != kBackground)
            continue;
          bool near_core = false, near_edema = false;
          for (int dz = -1; dz <= 1; ++dz)
            for (int dy = -1; dy <= 1; ++dy)
              for (int dx = -1; dx <= 1; ++dx) {
                const int nx = x + dx, ny = y + dy, nz = z + dz;
                if (nx < 0 || nx >= d.x || ny < 0 || ny >= d.y || nz < 0 ||
                    nz >= d.z || (dx == 0 && dy == 0 && dz == 0))
                  continue;
                const std::uint8_t v = out.labels(nx, ny, nz);
                near_core = near_core || v == kEnhancing || v == kNcrNet;
                near_edema = near_edema || v == kEdema;
              }
          interface_ok = interface_ok && !(near_core && near_edema);
        }

    // (d) each rule is idempotent
    idempotent_ok =
        idempotent_ok &&
        label_grids_equal(relabel_small_et(out).labels, out.labels) &&
        label_grids_equal(fill_tc_ed_interface(out).labels, out.labels);
    if (with_tc)
      idempotent_ok = idempotent_ok &&
                      label_grids_equal(tc_override(out, tc).labels,
                                        out.labels);
    const LabelVolume cleaned = clean_ed(out);
    idempotent_ok = idempotent_ok &&
                    label_grids_equal(clean_ed(cleaned).labels,
                                      cleaned.labels);
  }

  // Exact threshold behaviour: strictly-below volumes go, equality stays.
  bool threshold_ok = true;
  {
    const Dims3 big{40, 40, 40};
    LabelVolume keep(big), drop(big);
    for (int z = 0; z < 8; ++z)
      for (int y = 0; y < 5; ++y)
        for (int x = 0; x < 5; ++x) {
          keep.labels(x, y, z) = kEnhancing; // 200 voxels at 1 mm^3
          drop.labels(x, y, z) = kEnhancing;
        }
    drop.labels(0, 0, 0) = kBackground; // 199 voxels
    threshold_ok = threshold_ok &&
                   relabel_small_et(keep).labels(0, 0, 0) == kEnhancing &&
                   relabel_small_et(drop).labels(1, 0, 0) == kNcrNet;
  }
  {
    // Edema blob centred exactly 75 mm from the dominant blob stays; one
    // millimetre further it is removed.
    const Dims3 wide{100, 40, 40};
    LabelVolume at75(wide), at76(wide);
    for (auto *lv : {&at75, &at76})
      for (int z = 15; z < 25; ++z)
        for (int y = 15; y < 25; ++y)
          for (int x = 5; x < 15; ++x)
            lv->labels(x, y, z) = kEdema; // centroid x = 9.5
    for (int z = 19; z <= 20; ++z)
      for (int y = 19; y <= 20; ++y) {
        for (int x = 82; x <= 87; ++x)
          at75.labels(x, y, z) = kEdema; // centroid x = 84.5, distance 75.0
        for (int x = 83; x <= 88; ++x)
          at76.labels(x, y, z) = kEdema; // centroid x = 85.5, distance 76.0
      }
    threshold_ok = threshold_ok &&
                   clean_ed(at75).labels(82, 19, 19) == kEdema &&
                   clean_ed(at76).labels(83, 19, 19) == kBackground;
  }

  const double secs = seconds_since(t0);
  const bool ok = min_volume_ok && tc_ok && interface_ok && idempotent_ok &&
                  threshold_ok;
  std::ostringstream detail;
  detail << "500 volumes, thresholds at 200 mm^3 and 75 mm, " << secs << "s";
  report(5, "post-processing invariants and exact thresholds", ok,
         detail.str());
  CHECK(min_volume_ok);
  CHECK(tc_ok);
  CHECK(interface_ok);
  CHECK(idempotent_ok);
  CHECK(threshold_ok);
}

TEST_CASE("6: learning-rate schedule and fold sizes") {
  bool lr_ok = true;
  for (int epoch = 1; epoch <= 50; ++epoch) {
    const double expected =
        epoch <= 2 ? 1e-3 : (epoch <= 4 ? 1e-4 : 1e-5);
    lr_ok = lr_ok &&
            lr_at_epoch(epoch) == doctest::Approx(expected).epsilon(1e-12);
  }

  std::vector<std::string> ids;
  for (int i = 0; i < 369; ++i)
    ids.push_back("subj_" + std::to_string(1000 + i));
  const std::vector<FoldSplit> folds = make_folds(ids, 5, 0.1, 42);
  bool folds_ok = folds.size() == 5;
  const std::size_t expect_test[5] = {73, 73, 73, 73, 77};
  std::set<std::string> tested;
  for (std::size_t f = 0; folds_ok && f < folds.size(); ++f) {
    folds_ok = folds[f].test.size() == expect_test[f];
    tested.insert(folds[f].test.begin(), folds[f].test.end());
  }
  folds_ok = folds_ok && tested.size() == 369;

  const bool ok = lr_ok && folds_ok;
  report(6, "decayed schedule over 50 epochs and 369-subject fold sizes", ok,
         lr_ok ? "test folds 73+73+73+73+77" : "schedule mismatch");
  CHECK(lr_ok);
  CHECK(folds_ok);
}

TEST_CASE("7: end-to-end phantom study") {
  const auto t0 = Clock::now();
  const int width = 8, epochs = 2;
  const int n_total = 30, n_train = 24;

  std::vector<TrainSubject> train_set, test_set;
  std::vector<LabelVolume> test_truth;
  for (int i = 0; i < n_total; ++i) {
    const PhantomSpec spec =
        randomized_phantom_spec({64, 64, 64}, 2020, std::uint64_t(i));
    auto [vol, lab] = generate_phantom(spec);
    LabelVolume lab_copy = lab;
    CropResult crop =
        crop_to_standard(vol, &lab_copy, TargetGrid{lab.dims()});
    TrainSubject s;
    s.id = "p" + std::to_string(i);
    s.vol = gaussian_normalize(crop.volume);
    s.labels = crop.labels->labels;
    if (i < n_train) {
      train_set.push_back(std::move(s));
    } else {
      test_set.push_back(std::move(s));
      test_truth.push_back(lab);
    }
  }

  TrainConfig tcfg;
  tcfg.epochs = epochs;
  tcfg.seed = 11;
  AugmentConfig acfg;
  const std::vector<TrainSubject> no_val;

  ModelSet models;
  const struct {
    Plane plane;
    bool tc;
  } roles[] = {{Plane::Axial, false},
               {Plane::Sagittal, false},
               {Plane::Coronal, false},
               {Plane::Axial, true}};
  int ri = 0;
  for (const auto &role : roles) {
    UNetConfig net = default_net_config(role.plane, role.tc, width,
                                        substream_seed(99, ri, 0));
    TrainConfig tc2 = tcfg;
    tc2.seed = substream_seed(7, ri, 0);
    TrainResult res =
        train_model(train_set, no_val, net, tc2, acfg, role.plane, role.tc);
    if (role.tc)
      models.tc = std::move(res.params);
    else if (role.plane == Plane::Axial)
      models.axial = std::move(res.params);
    else if (role.plane == Plane::Sagittal)
      models.sagittal = std::move(res.params);
    else
      models.coronal = std::move(res.params);
    ++ri;
  }

  double wt_tptc = 0, wt_a = 0;
  for (std::size_t i = 0; i < test_set.size(); ++i) {
    for (Subset s : {Subset::TPTC, Subset::A}) {
      SubjectPrediction pred = predict_subject(models, test_set[i].vol, s);
      const LabelVolume post =
          pred.p_tc ? postprocess(pred.labels, derive_tc_mask(*pred.p_tc))
                    : postprocess(pred.labels);
      const MetricsReport rep = evaluate_subject(post, test_truth[i]);
      const double wt = rep.regions[int(SubRegion::WT)].dice;
      if (s == Subset::TPTC)
        wt_tptc += wt;
      else
        wt_a += wt;
    }
  }
  wt_tptc /= double(test_set.size());
  wt_a /= double(test_set.size());

  const double secs = seconds_since(t0);
  const bool ok = wt_tptc >= 0.80 && wt_tptc >= wt_a - 0.02 && secs <= 3600.0;
  std::ostringstream detail;
  detail << "mean WT dice " << wt_tptc << " (full ensemble) vs " << wt_a
         << " (axial only) on 6 held-out phantoms, " << secs << "s";
  report(7, "held-out phantom study beats the dice bar", ok, detail.str());
  CHECK(wt_tptc >= 0.80);
  CHECK(wt_tptc >= wt_a - 0.02);
  CHECK(secs <= 3600.0);
}

TEST_CASE("8: ablation harness emits the full comparison table") {
  const fs::path root = fresh_dir("ablation_data");
  const fs::path out = fresh_dir("ablation_out");
  for (int i = 0; i < 10; ++i) {
    const std::string id = "case_" + std::to_string(300 + i);
    const PhantomSpec spec = randomized_phantom_spec({16, 16, 16}, 4040, i);
    const auto [vol, labels] = generate_phantom(spec);
    save_subject(root.string(), id, vol, &labels);
  }

  CrossvalConfig cfg;
  cfg.folds = 2;
  cfg.subset = Subset::TPTC;
  cfg.ablate = true;
  cfg.run.train.epochs = 1;
  cfg.run.train.batch_size = 8;
  cfg.run.train.val_fraction = 0.34;
  cfg.run.train.seed = 3;
  cfg.run.net.base_width = 2;

  const CrossvalResult result =
      run_crossval(scan_dataset(root.string()), cfg, out.string());

  bool table_ok = result.subsets.size() == 4;
  for (const SubsetResult &sr : result.subsets)
    table_ok = table_ok && sr.reports.size() == 10;

  std::vector<std::string> lines;
  {
    std::ifstream in(out / "ablation.csv");
    std::string line;
    while (std::getline(in, line))
      lines.push_back(line);
  }
  table_ok = table_ok && lines.size() == 15;
  if (table_ok) {
    table_ok =
        lines[0] ==
        "config,stat,dice_ET,dice_WT,dice_TC,sensitivity_ET,sensitivity_WT,"
        "sensitivity_TC,specificity_ET,specificity_WT,specificity_TC,"
        "h95_ET,h95_WT,h95_TC";
    const char *stat_rows[8] = {"A,mean",    "A,std",    "AS,mean",
                                "AS,std",    "TP,mean",  "TP,std",
                                "TPTC,mean", "TPTC,std"};
    for (int i = 0; i < 8; ++i)
      table_ok = table_ok &&
                 lines[1 + i].rfind(stat_rows[i], 0) == 0;
    const char *pair_rows[6] = {"A_vs_AS,pvalue",    "A_vs_TP,pvalue",
                                "A_vs_TPTC,pvalue",  "AS_vs_TP,pvalue",
                                "AS_vs_TPTC,pvalue", "TP_vs_TPTC,pvalue"};
    for (int i = 0; i < 6; ++i)
      table_ok = table_ok && lines[9 + i].rfind(pair_rows[i], 0) == 0;
    for (const std::string &line : lines) {
      int commas = 0;
      for (char ch : line)
        commas += ch == ',';
      table_ok = table_ok && commas == 13;
    }
    // p-value cells are valid probabilities
    for (int i = 9; i < 11 && table_ok; ++i) {
      std::stringstream ss(lines[i]);
      std::string cell;
      std::getline(ss, cell, ',');
      std::getline(ss, cell, ',');
      while (std::getline(ss, cell, ',')) {
        const double p = std::stod(cell);
        table_ok = table_ok && p >= 0.0 && p <= 1.0;
      }
    }
  }

  const TTestResult oracle = paired_t_test({1.0, 2.0, 3.0}, {0.0, 0.0, 0.0});
  const bool t_ok =
      std::abs(oracle.t - 3.4641) < 1e-3 && std::abs(oracle.p - 0.0742) < 1e-3;

  const bool ok = table_ok && t_ok;
  std::ostringstream detail;
  detail << "4 configs x 12 columns, 6 pairwise rows, t " << oracle.t
         << ", p " << oracle.p;
  report(8, "ablation table shape and paired t-test oracle", ok,
         detail.str());
  CHECK(table_ok);
  CHECK(t_ok);
}
