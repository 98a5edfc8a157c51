#pragma once

// Shared fixtures: randomized label volumes and an independent brute-force
// oracle for the boundary-distance metric.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "tumseg/rng.hpp"
#include "tumseg/volume.hpp"

namespace testutil {

using namespace tumseg;

/// A handful of axis-aligned boxes of random class plus scattered single
/// voxels, so volumes contain both bulky and tiny components.
inline LabelVolume random_label_volume(Dims3 d, std::uint64_t seed,
                                       int max_boxes = 5, int max_points = 25) {
  Rng rng(seed);
  LabelVolume out(d);
  const int boxes = int(rng.uniform_int(0, max_boxes));
  for (int b = 0; b < boxes; ++b) {
    const std::uint8_t cls = std::uint8_t(rng.uniform_int(1, 3));
    const int x0 = int(rng.uniform_int(0, d.x - 1));
    const int y0 = int(rng.uniform_int(0, d.y - 1));
    const int z0 = int(rng.uniform_int(0, d.z - 1));
    const int ex = int(rng.uniform_int(1, std::max(1, d.x / 3)));
    const int ey = int(rng.uniform_int(1, std::max(1, d.y / 3)));
    const int ez = int(rng.uniform_int(1, std::max(1, d.z / 3)));
    for (int z = z0; z < std::min(d.z, z0 + ez); ++z)
      for (int y = y0; y < std::min(d.y, y0 + ey); ++y)
        for (int x = x0; x < std::min(d.x, x0 + ex); ++x)
          out.labels(x, y, z) = cls;
  }
  const int points = int(rng.uniform_int(0, max_points));
  for (int p = 0; p < points; ++p) {
    const int x = int(rng.uniform_int(0, d.x - 1));
    const int y = int(rng.uniform_int(0, d.y - 1));
    const int z = int(rng.uniform_int(0, d.z - 1));
    out.labels(x, y, z) = std::uint8_t(rng.uniform_int(1, 3));
  }
  return out;
}

inline GridU8 random_mask(Dims3 d, std::uint64_t seed) {
  LabelVolume lab = random_label_volume(d, seed);
  GridU8 mask(d);
  for (std::size_t i = 0; i < mask.size(); ++i)
    mask[i] = lab.labels[i] != 0;
  return mask;
}

/// Mask voxels with a 6-neighbour outside the mask or outside the grid.
inline std::vector<std::size_t> boundary6(const GridU8 &mask) {
  const Dims3 d = mask.dims();
  std::vector<std::size_t> out;
  auto in = [&](int x, int y, int z) {
    if (x < 0 || x >= d.x || y < 0 || y >= d.y || z < 0 || z >= d.z)
      return false;
    return mask(x, y, z) != 0;
  };
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i])
      continue;
    const auto c = mask.coords(i);
    if (!in(c[0] - 1, c[1], c[2]) || !in(c[0] + 1, c[1], c[2]) ||
        !in(c[0], c[1] - 1, c[2]) || !in(c[0], c[1] + 1, c[2]) ||
        !in(c[0], c[1], c[2] - 1) || !in(c[0], c[1], c[2] + 1))
      out.push_back(i);
  }
  return out;
}

inline double interp_pctl95(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const double h = double(v.size() - 1) * 0.95;
  const std::size_t i = std::size_t(h);
  if (i + 1 >= v.size())
    return v.back();
  return v[i] + (h - double(i)) * (v[i + 1] - v[i]);
}

/// All-pairs reference for the 95th-percentile symmetric boundary distance.
inline double brute_h95(const GridU8 &pred, const GridU8 &truth,
                        std::array<double, 3> vox = {1, 1, 1}) {
  const auto bp = boundary6(pred);
  const auto bt = boundary6(truth);
  if (bp.empty() && bt.empty())
    return 0.0;
  if (bp.empty() || bt.empty()) {
    const Dims3 d = pred.dims();
    const double dx = d.x * vox[0], dy = d.y * vox[1], dz = d.z * vox[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
  }
  auto dist = [&](std::size_t a, std::size_t b) {
    const auto ca = pred.coords(a), cb = pred.coords(b);
    const double dx = (ca[0] - cb[0]) * vox[0];
    const double dy = (ca[1] - cb[1]) * vox[1];
    const double dz = (ca[2] - cb[2]) * vox[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
  };
  std::vector<double> pooled;
  pooled.reserve(bp.size() + bt.size());
  for (std::size_t a : bp) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t b : bt)
      best = std::min(best, dist(a, b));
    pooled.push_back(best);
  }
  for (std::size_t b : bt) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a : bp)
      best = std::min(best, dist(b, a));
    pooled.push_back(best);
  }
  return interp_pctl95(std::move(pooled));
}

} // namespace testutil
