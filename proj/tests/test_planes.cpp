#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tumseg/planes.hpp"
#include "tumseg/rng.hpp"

using namespace tumseg;

namespace {

MultiModalVolume random_volume(Dims3 d, std::uint64_t seed) {
  MultiModalVolume vol(d);
  Rng rng(seed);
  for (int m = 0; m < kModalities; ++m)
    for (std::size_t i = 0; i < vol.mod[m].size(); ++i)
      vol.mod[m][i] = float(rng.normal());
  return vol;
}

ProbVolume random_simplex(Dims3 d, int classes, std::uint64_t seed) {
  ProbVolume p(d, classes);
  Rng rng(seed);
  for (std::size_t i = 0; i < p.prob[0].size(); ++i) {
    float sum = 0;
    for (int c = 0; c < classes; ++c) {
      p.prob[c][i] = float(rng.uniform(0.01, 1.0));
      sum += p.prob[c][i];
    }
    for (int c = 0; c < classes; ++c)
      p.prob[c][i] /= sum;
  }
  return p;
}

} // namespace

TEST_CASE("slice geometry per plane on the clinical working grid") {
  const Dims3 d{192, 192, 160};
  const PlaneShape ax = plane_shape(Plane::Axial, d);
  CHECK(ax.count == 160);
  CHECK(ax.rows == 192);
  CHECK(ax.cols == 192);
  const PlaneShape sg = plane_shape(Plane::Sagittal, d);
  CHECK(sg.count == 192);
  CHECK(sg.rows == 192);
  CHECK(sg.cols == 160);
  const PlaneShape co = plane_shape(Plane::Coronal, d);
  CHECK(co.count == 192);
  CHECK(co.rows == 192);
  CHECK(co.cols == 160);
}

TEST_CASE("voxel-to-slice coordinate mapping") {
  MultiModalVolume vol({32, 32, 32});
  vol.mod[kFlair](10, 20, 30) = 9.0f;

  const SliceStack ax = extract_slices(vol, Plane::Axial);
  CHECK(ax.slices[30].at(kFlair, 10, 20) == 9.0f);
  const SliceStack sg = extract_slices(vol, Plane::Sagittal);
  CHECK(sg.slices[10].at(kFlair, 20, 30) == 9.0f);
  const SliceStack co = extract_slices(vol, Plane::Coronal);
  CHECK(co.slices[20].at(kFlair, 10, 30) == 9.0f);

  CHECK(plane_coords(Plane::Axial, 10, 20, 30) ==
        std::array<int, 3>{30, 10, 20});
  CHECK(plane_coords(Plane::Sagittal, 10, 20, 30) ==
        std::array<int, 3>{10, 20, 30});
  CHECK(plane_coords(Plane::Coronal, 10, 20, 30) ==
        std::array<int, 3>{20, 10, 30});
}

TEST_CASE("extraction followed by assembly reproduces the volume exactly") {
  const Dims3 d{16, 12, 8};
  const MultiModalVolume vol = random_volume(d, 21);
  for (Plane plane : {Plane::Axial, Plane::Sagittal, Plane::Coronal}) {
    const SliceStack stack = extract_slices(vol, plane);
    CHECK(int(stack.slices.size()) == plane_shape(plane, d).count);
    const ProbVolume back = assemble_probs(stack, plane);
    REQUIRE(back.num_classes() == kModalities);
    for (int m = 0; m < kModalities; ++m)
      CHECK(back.prob[m] == vol.mod[m]);
  }
}

TEST_CASE("label slices keep integer class codes") {
  GridU8 labels({12, 8, 8});
  Rng rng(3);
  for (std::size_t i = 0; i < labels.size(); ++i)
    labels[i] = std::uint8_t(rng.uniform_int(0, 3));
  const SliceStack stack = extract_label_slices(labels, Plane::Coronal);
  REQUIRE(stack.slices.size() == 8);
  for (const Slice2D &sl : stack.slices) {
    REQUIRE(sl.channels.size() == 1);
    for (int r = 0; r < sl.rows; ++r)
      for (int c = 0; c < sl.cols; ++c) {
        const float v = sl.at(0, r, c);
        CHECK(v == float(int(v)));
        CHECK(v >= 0.0f);
        CHECK(v <= 3.0f);
      }
  }
}

TEST_CASE("assembly rejects missing, duplicate or misshapen slices") {
  const MultiModalVolume vol = random_volume({8, 8, 8}, 5);
  SliceStack stack = extract_slices(vol, Plane::Axial);

  SliceStack missing = stack;
  missing.slices.pop_back();
  CHECK_THROWS_AS(assemble_probs(missing, Plane::Axial), IncompleteStack);

  SliceStack dup = stack;
  dup.slices[1].index = 0;
  CHECK_THROWS_AS(assemble_probs(dup, Plane::Axial), IncompleteStack);

  SliceStack bad = stack;
  bad.slices[2].rows = 4;
  CHECK_THROWS_AS(assemble_probs(bad, Plane::Axial), ShapeMismatch);
}

TEST_CASE("grids unsuitable for slicing are rejected") {
  CHECK_THROWS_AS(extract_slices(MultiModalVolume({10, 12, 8}), Plane::Axial),
                  NonStandardGrid);
  CHECK_THROWS_AS(extract_slices(MultiModalVolume({8, 8, 4}), Plane::Axial),
                  NonStandardGrid);
}

TEST_CASE("probability averaging is the voxelwise mean") {
  const Dims3 d{1, 1, 1};
  auto two_class = [&](float p0, float p1) {
    ProbVolume p(d, 2);
    p.prob[0][0] = p0;
    p.prob[1][0] = p1;
    return p;
  };
  const ProbVolume avg = average_probs(
      {two_class(0.2f, 0.8f), two_class(0.4f, 0.6f), two_class(0.6f, 0.4f)});
  CHECK(avg.prob[0][0] == doctest::Approx(0.4).epsilon(1e-6));
  CHECK(avg.prob[1][0] == doctest::Approx(0.6).epsilon(1e-6));

  const ProbVolume same = random_simplex({8, 8, 8}, 4, 17);
  const ProbVolume avg_same = average_probs({same, same, same});
  for (int c = 0; c < 4; ++c)
    for (std::size_t i = 0; i < same.prob[c].size(); ++i)
      CHECK(avg_same.prob[c][i] == doctest::Approx(same.prob[c][i]));
}

TEST_CASE("probability averaging is order-insensitive and stays a simplex") {
  const ProbVolume a = random_simplex({8, 8, 8}, 4, 31);
  const ProbVolume b = random_simplex({8, 8, 8}, 4, 32);
  const ProbVolume c = random_simplex({8, 8, 8}, 4, 33);
  const ProbVolume abc = average_probs({a, b, c});
  const ProbVolume cba = average_probs({c, b, a});
  for (int ch = 0; ch < 4; ++ch)
    for (std::size_t i = 0; i < abc.prob[ch].size(); ++i)
      CHECK(abc.prob[ch][i] ==
            doctest::Approx(cba.prob[ch][i]).epsilon(1e-6));
  for (std::size_t i = 0; i < abc.prob[0].size(); ++i) {
    float sum = 0;
    for (int ch = 0; ch < 4; ++ch)
      sum += abc.prob[ch][i];
    CHECK(sum == doctest::Approx(1.0f).epsilon(1e-5));
  }
}

TEST_CASE("probability averaging validates its inputs") {
  CHECK_THROWS_AS(average_probs({}), ShapeMismatch);
  const ProbVolume a = random_simplex({8, 8, 8}, 4, 1);
  const ProbVolume b = random_simplex({8, 8, 12}, 4, 2);
  CHECK_THROWS_AS(average_probs({a, b}), ShapeMismatch);
  const ProbVolume c = random_simplex({8, 8, 8}, 2, 3);
  CHECK_THROWS_AS(average_probs({a, c}), ShapeMismatch);
}

TEST_CASE("plane names round trip") {
  for (Plane p : {Plane::Axial, Plane::Sagittal, Plane::Coronal})
    CHECK(parse_plane(plane_name(p)) == p);
  CHECK_THROWS_AS(parse_plane("diagonal"), ConfigError);
}
