#include "tumseg/postproc.hpp"

#include <algorithm>
#include <cmath>

#include "tumseg/errors.hpp"

namespace tumseg {
namespace {

/// Neighbour offsets for 6- or 26-connectivity.
std::vector<std::array<int, 3>> neighbour_offsets(int connectivity) {
  if (connectivity == 6)
    return {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1},
            {0, 0, -1}};
  if (connectivity != 26)
    throw ConfigError("connectivity must be 6 or 26");
  std::vector<std::array<int, 3>> offs;
  for (int dx = -1; dx <= 1; ++dx)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dz = -1; dz <= 1; ++dz)
        if (dx || dy || dz)
          offs.push_back({dx, dy, dz});
  return offs;
}

std::array<int, 3> min_voxel(const GridU8 &grid, const Component &comp) {
  std::array<int, 3> best{INT32_MAX, INT32_MAX, INT32_MAX};
  for (std::int64_t i : comp.voxels) {
    const auto c = grid.coords(i);
    const std::array<int, 3> v{c[0], c[1], c[2]};
    if (v < best)
      best = v;
  }
  return best;
}

double centroid_distance(const Component &a, const Component &b) {
  const double dx = a.centroid_mm[0] - b.centroid_mm[0];
  const double dy = a.centroid_mm[1] - b.centroid_mm[1];
  const double dz = a.centroid_mm[2] - b.centroid_mm[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

/// Components of `labels == cls`, at 26-connectivity in subject space.
std::vector<Component> label_components(const LabelVolume &vol,
                                        std::uint8_t cls) {
  GridU8 mask(vol.dims());
  for (std::size_t i = 0; i < mask.size(); ++i)
    mask[i] = vol.labels[i] == cls ? 1 : 0;
  return connected_components(mask, 26,
                              {vol.voxel_size_mm[0], vol.voxel_size_mm[1],
                               vol.voxel_size_mm[2]});
}

} // namespace

std::vector<Component>
connected_components(const GridU8 &mask, int connectivity,
                     const std::array<double, 3> &voxel_size_mm) {
  const auto offs = neighbour_offsets(connectivity);
  const Dims3 d = mask.dims();
  const double voxel_volume =
      voxel_size_mm[0] * voxel_size_mm[1] * voxel_size_mm[2];

  std::vector<std::uint8_t> seen(mask.size(), 0);
  std::vector<Component> out;
  std::vector<std::int64_t> stack;

  for (std::int64_t start = 0; start < std::int64_t(mask.size()); ++start) {
    if (!mask[start] || seen[start])
      continue;
    Component comp;
    double sx = 0, sy = 0, sz = 0;
    stack.assign(1, start);
    seen[start] = 1;
    while (!stack.empty()) {
      const std::int64_t i = stack.back();
      stack.pop_back();
      comp.voxels.push_back(i);
      const auto c = mask.coords(i);
      sx += c[0];
      sy += c[1];
      sz += c[2];
      for (const auto &o : offs) {
        const int x = c[0] + o[0], y = c[1] + o[1], z = c[2] + o[2];
        if (x < 0 || x >= d.x || y < 0 || y >= d.y || z < 0 || z >= d.z)
          continue;
        const std::int64_t j = x + std::int64_t(d.x) * (y + std::int64_t(d.y) * z);
        if (mask[j] && !seen[j]) {
          seen[j] = 1;
          stack.push_back(j);
        }
      }
    }
    const double n = double(comp.voxels.size());
    comp.volume_mm3 = n * voxel_volume;
    comp.centroid_mm = {sx / n * voxel_size_mm[0], sy / n * voxel_size_mm[1],
                        sz / n * voxel_size_mm[2]};
    std::sort(comp.voxels.begin(), comp.voxels.end());
    out.push_back(std::move(comp));
  }

  std::sort(out.begin(), out.end(), [&mask](const Component &a,
                                            const Component &b) {
    if (a.voxels.size() != b.voxels.size())
      return a.voxels.size() > b.voxels.size();
    return min_voxel(mask, a) < min_voxel(mask, b);
  });
  return out;
}

LabelVolume relabel_small_et(const LabelVolume &labels) {
  LabelVolume out = labels;
  for (const Component &comp : label_components(labels, kEnhancing))
    if (comp.volume_mm3 < kMinEtVolumeMm3)
      for (std::int64_t i : comp.voxels)
        out.labels[i] = kNcrNet;
  return out;
}

LabelVolume tc_override(const LabelVolume &labels, const TCMask &tc) {
  require_same_dims(labels.dims(), tc.dims(), "tc_override");
  LabelVolume out = labels;
  for (std::size_t i = 0; i < tc.mask.size(); ++i)
    if (tc.mask[i] && out.labels[i] != kEnhancing)
      out.labels[i] = kNcrNet;
  return out;
}

LabelVolume clean_ed(const LabelVolume &labels) {
  const auto comps = label_components(labels, kEdema);
  if (comps.empty())
    return labels;
  LabelVolume out = labels;
  const Component &largest = comps.front();
  for (std::size_t k = 1; k < comps.size(); ++k) {
    const Component &comp = comps[k];
    if (comp.volume_mm3 < kMinEdVolumeMm3 &&
        centroid_distance(comp, largest) > kMaxEdDistanceMm)
      for (std::int64_t i : comp.voxels)
        out.labels[i] = kBackground;
  }
  return out;
}

LabelVolume fill_tc_ed_interface(const LabelVolume &labels) {
  const auto offs = neighbour_offsets(26);
  const Dims3 d = labels.dims();
  LabelVolume out = labels;
  // Each round strictly grows the ED set, so this terminates; realistic
  // volumes settle within a handful of rounds.
  while (true) {
    std::vector<std::int64_t> to_fill;
    for (std::int64_t i = 0; i < std::int64_t(out.labels.size()); ++i) {
      if (out.labels[i] != kBackground)
        continue;
      const auto c = out.labels.coords(i);
      bool near_tc = false, near_ed = false;
      for (const auto &o : offs) {
        const int x = c[0] + o[0], y = c[1] + o[1], z = c[2] + o[2];
        if (x < 0 || x >= d.x || y < 0 || y >= d.y || z < 0 || z >= d.z)
          continue;
        const std::uint8_t v =
            out.labels[x + std::int64_t(d.x) * (y + std::int64_t(d.y) * z)];
        near_tc |= (v == kEnhancing || v == kNcrNet);
        near_ed |= (v == kEdema);
        if (near_tc && near_ed)
          break;
      }
      if (near_tc && near_ed)
        to_fill.push_back(i);
    }
    if (to_fill.empty())
      break;
    for (std::int64_t i : to_fill)
      out.labels[i] = kEdema;
  }
  return out;
}

LabelVolume postprocess(const LabelVolume &labels, const TCMask &tc) {
  return fill_tc_ed_interface(clean_ed(tc_override(relabel_small_et(labels),
                                                   tc)));
}

LabelVolume postprocess(const LabelVolume &labels) {
  return fill_tc_ed_interface(clean_ed(relabel_small_et(labels)));
}

} // namespace tumseg
