#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "tumseg/train.hpp"

using namespace tumseg;
namespace fs = std::filesystem;

namespace {

/// One tiny subject whose label is a deterministic function of intensity:
/// modality m is the indicator of class m, with nested boxes of classes
/// 1..3 inside a class-0 shell.
TrainSubject toy_subject(const std::string &id) {
  const Dims3 d{16, 16, 8};
  TrainSubject s;
  s.id = id;
  s.vol = MultiModalVolume(d);
  s.labels = GridU8(d);
  for (int z = 0; z < d.z; ++z)
    for (int y = 0; y < d.y; ++y)
      for (int x = 0; x < d.x; ++x) {
        int cls = 0;
        if (x >= 4 && x < 12 && y >= 4 && y < 12)
          cls = 1;
        if (x >= 6 && x < 10 && y >= 6 && y < 10)
          cls = 2;
        if (x >= 7 && x < 9 && y >= 7 && y < 9)
          cls = 3;
        s.labels(x, y, z) = std::uint8_t(cls);
        for (int m = 0; m < kModalities; ++m)
          s.vol.mod[m](x, y, z) = (m == cls) ? 1.0f : 0.0f;
      }
  return s;
}

TrainConfig fast_config(int epochs) {
  TrainConfig t;
  t.epochs = epochs;
  t.batch_size = 8;
  t.lr_initial = 1e-3;
  t.lr_factor = 1.0; // constant rate for the toy problem
  t.seed = 11;
  return t;
}

bool same_params(const UNetParams<float> &a, const UNetParams<float> &b) {
  bool ok = a.config == b.config;
  std::vector<std::pair<const float *, std::int64_t>> sa, sb;
  visit_param_arrays(const_cast<UNetParams<float> &>(a),
                     [&sa](const char *, float *d, std::int64_t n) {
                       sa.emplace_back(d, n);
                     });
  visit_param_arrays(const_cast<UNetParams<float> &>(b),
                     [&sb](const char *, float *d, std::int64_t n) {
                       sb.emplace_back(d, n);
                     });
  for (std::size_t i = 0; i < sa.size(); ++i)
    ok = ok && sa[i].second == sb[i].second &&
         std::memcmp(sa[i].first, sb[i].first,
                     std::size_t(sa[i].second) * sizeof(float)) == 0;
  return ok;
}

} // namespace

TEST_CASE("training overfits an easily separable toy subject") {
  const std::vector<TrainSubject> train{toy_subject("t0")};
  const std::vector<TrainSubject> val{toy_subject("v0")};
  const UNetConfig net = default_net_config(Plane::Axial, false, 4, 21);
  AugmentConfig aug;
  aug.factor = 1; // originals only

  // 8 axial slices in one batch: one optimizer step per epoch, so give the
  // run a hot constant rate and enough epochs to actually overfit.
  TrainConfig tcfg = fast_config(250);
  tcfg.lr_initial = 5e-3;

  const TrainResult res =
      train_model(train, val, net, tcfg, aug, Plane::Axial, false);
  REQUIRE(res.history.size() == 250);
  const EpochLoss &first = res.history.front();
  const EpochLoss &last = res.history.back();
  CHECK(last.train.total < first.train.total);
  CHECK(last.train.total < 0.0);
  CHECK(first.has_val);
  CHECK(last.has_val);
  CHECK(last.val.total < first.val.total);
  for (const EpochLoss &e : res.history) {
    CHECK(e.lr == 5e-3);
    CHECK(std::isfinite(e.train.total));
  }
}

TEST_CASE("training runs without a validation set") {
  const std::vector<TrainSubject> train{toy_subject("t0")};
  const UNetConfig net = default_net_config(Plane::Axial, false, 2, 3);
  AugmentConfig aug;
  const TrainResult res = train_model(train, {}, net, fast_config(2), aug,
                                      Plane::Axial, false);
  for (const EpochLoss &e : res.history)
    CHECK_FALSE(e.has_val);
}

TEST_CASE("identical configurations reproduce bit-identical models") {
  const std::vector<TrainSubject> train{toy_subject("t0")};
  const UNetConfig net = default_net_config(Plane::Axial, false, 2, 5);
  AugmentConfig aug; // factor 2: augmentation streams exercised
  auto run = [&] {
    return train_model(train, {}, net, fast_config(3), aug, Plane::Axial,
                       false);
  };
  const TrainResult a = run();
  const TrainResult b = run();
  CHECK(same_params(a.params, b.params));
  REQUIRE(a.history.size() == b.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    CHECK(a.history[i].train.total == b.history[i].train.total);
    CHECK(a.history[i].train.ce == b.history[i].train.ce);
  }
}

TEST_CASE("tumour-core training collapses labels to a binary task") {
  const std::vector<TrainSubject> train{toy_subject("t0")};
  const UNetConfig net = default_net_config(Plane::Axial, true, 2, 6);
  REQUIRE(net.num_classes == 2);
  AugmentConfig aug;
  aug.factor = 1;
  const TrainResult res = train_model(train, {}, net, fast_config(2), aug,
                                      Plane::Axial, true);
  CHECK(res.params.config.num_classes == 2);
  CHECK(std::isfinite(res.history.back().train.total));
}

TEST_CASE("invalid training requests are rejected") {
  const std::vector<TrainSubject> train{toy_subject("t0")};
  AugmentConfig aug;
  const TrainConfig tcfg = fast_config(1);

  // tumour-core mode with a 4-class head
  CHECK_THROWS_AS(train_model(train, {},
                              default_net_config(Plane::Axial, false, 2, 1),
                              tcfg, aug, Plane::Axial, true),
                  ConfigError);
  // tumour-core mode off the axial plane
  CHECK_THROWS_AS(train_model(train, {},
                              default_net_config(Plane::Axial, true, 2, 1),
                              tcfg, aug, Plane::Sagittal, true),
                  ConfigError);
  // nothing to train on
  CHECK_THROWS_AS(train_model({}, {},
                              default_net_config(Plane::Axial, false, 2, 1),
                              tcfg, aug, Plane::Axial, false),
                  EmptyDataset);

  TrainConfig bad = tcfg;
  bad.batch_size = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = tcfg;
  bad.lr_floor = 1.0; // above lr_initial
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = tcfg;
  bad.val_fraction = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("network defaults differ per plane and role") {
  const UNetConfig ax = default_net_config(Plane::Axial, false, 16, 1);
  CHECK(ax.initial_kernel == 3);
  CHECK(ax.num_classes == 4);
  CHECK(ax.in_channels == 4);
  CHECK(ax.base_width == 16);
  CHECK(ax.seed == 1);
  CHECK(default_net_config(Plane::Sagittal, false, 16, 1).initial_kernel == 5);
  CHECK(default_net_config(Plane::Coronal, false, 16, 1).initial_kernel == 5);
  const UNetConfig tc = default_net_config(Plane::Axial, true, 16, 1);
  CHECK(tc.initial_kernel == 3);
  CHECK(tc.num_classes == 2);
}

TEST_CASE("loss history files list one row per epoch and split") {
  std::vector<EpochLoss> history(2);
  history[0].epoch = 1;
  history[0].lr = 1e-3;
  history[0].train.ce = 1.5;
  history[0].train.dice_term = -0.25;
  history[0].train.total = 1.25;
  history[0].has_val = true;
  history[0].val.total = 1.5;
  history[1].epoch = 2;
  history[1].lr = 1e-3;
  history[1].train.total = 1.0;

  const fs::path dir = fs::temp_directory_path() / "tumseg_train_tests";
  fs::create_directories(dir);
  const fs::path p = dir / "loss.csv";
  write_loss_history(p.string(), history);

  std::ifstream in(p);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line))
    lines.push_back(line);
  REQUIRE(lines.size() == 4); // header + train/val + train
  CHECK(lines[0] == "epoch,split,lr,ce,dice_term,total");
  CHECK(lines[1].rfind("1,train,0.001,1.5,-0.25,1.25", 0) == 0);
  CHECK(lines[2].rfind("1,val,", 0) == 0);
  CHECK(lines[3].rfind("2,train,", 0) == 0);

  CHECK_THROWS_AS(write_loss_history((dir / "no_dir" / "x.csv").string(),
                                     history),
                  IoFailure);
}
