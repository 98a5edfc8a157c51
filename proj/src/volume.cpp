#include "tumseg/volume.hpp"

#include <algorithm>
#include <cmath>

namespace tumseg {

LabelVolume remap_labels(const LabelVolume &vol, LabelDirection direction) {
  // internal 0,1,2,3 <-> external 0,1,2,4
  std::array<int, 256> table;
  table.fill(-1);
  if (direction == LabelDirection::ExternalToInternal) {
    for (int c = 0; c < kNumClasses; ++c)
      table[kExternalCodes[c]] = c;
  } else {
    for (int c = 0; c < kNumClasses; ++c)
      table[c] = kExternalCodes[c];
  }

  LabelVolume out = vol;
  for (std::size_t i = 0; i < vol.labels.size(); ++i) {
    const int mapped = table[vol.labels[i]];
    if (mapped < 0)
      throw UnknownLabel(vol.labels[i], i);
    out.labels[i] = static_cast<std::uint8_t>(mapped);
  }
  return out;
}

TCMask derive_tc(const LabelVolume &labels) {
  TCMask tc(labels.dims());
  for (std::size_t i = 0; i < labels.labels.size(); ++i) {
    const auto v = labels.labels[i];
    tc.mask[i] = (v == kNcrNet || v == kEnhancing) ? 1 : 0;
  }
  return tc;
}

BoundingBox brain_bounding_box(const MultiModalVolume &vol) {
  const Dims3 d = vol.dims();
  BoundingBox bb{{d.x, d.y, d.z}, {-1, -1, -1}};
  std::size_t i = 0;
  for (int z = 0; z < d.z; ++z)
    for (int y = 0; y < d.y; ++y)
      for (int x = 0; x < d.x; ++x, ++i) {
        bool nonzero = false;
        for (int m = 0; m < kModalities && !nonzero; ++m)
          nonzero = vol.mod[m][i] != 0.0f;
        if (!nonzero)
          continue;
        bb.lo[0] = std::min(bb.lo[0], x);
        bb.lo[1] = std::min(bb.lo[1], y);
        bb.lo[2] = std::min(bb.lo[2], z);
        bb.hi[0] = std::max(bb.hi[0], x);
        bb.hi[1] = std::max(bb.hi[1], y);
        bb.hi[2] = std::max(bb.hi[2], z);
      }
  if (bb.hi[0] < 0)
    throw NoBrainVoxels("volume has no nonzero voxels");
  return bb;
}

namespace {

// Window start: bbox centre at window centre, shifted minimally to contain
// the bbox when it fits, clamped to the grid.
int crop_offset(int lo, int hi, int window, int extent) {
  const int centre = (lo + hi) / 2;
  int o = centre - window / 2;
  if (hi - lo + 1 <= window)
    o = std::clamp(o, hi - window + 1, lo);
  return std::clamp(o, 0, extent - window);
}

template <typename T>
Grid3<T> crop_grid(const Grid3<T> &g, const CropSpec &s, Dims3 out_dims) {
  Grid3<T> out(out_dims);
  for (int z = 0; z < g.dims().z; ++z)
    for (int y = 0; y < out_dims.y; ++y)
      for (int x = 0; x < out_dims.x; ++x)
        out(x, y, z + s.pad_z_lo) = g(x + s.x0, y + s.y0, z);
  return out;
}

} // namespace

CropResult crop_to_standard(const MultiModalVolume &vol, const LabelVolume *labels,
                            TargetGrid target) {
  const Dims3 d = vol.dims();
  const Dims3 t = target.dims;
  if (d.x < t.x || d.y < t.y)
    throw GridTooSmall("input " + d.str() + " smaller than target " + t.str() +
                       " in x/y");
  if (d.z > t.z)
    throw GridTooDeep("input depth " + std::to_string(d.z) + " exceeds target " +
                      std::to_string(t.z));
  if (labels)
    require_same_dims(labels->dims(), d, "crop_to_standard labels");

  const BoundingBox bb = brain_bounding_box(vol);

  CropSpec spec;
  spec.original_dims = d;
  spec.x0 = crop_offset(bb.lo[0], bb.hi[0], t.x, d.x);
  spec.y0 = crop_offset(bb.lo[1], bb.hi[1], t.y, d.y);
  const int pad = t.z - d.z;
  spec.pad_z_lo = pad / 2;
  spec.pad_z_hi = pad - pad / 2;

  CropResult res;
  res.spec = spec;
  res.volume.voxel_size_mm = vol.voxel_size_mm;
  for (int m = 0; m < kModalities; ++m)
    res.volume.mod[m] = crop_grid(vol.mod[m], spec, t);
  if (labels) {
    LabelVolume lv;
    lv.voxel_size_mm = labels->voxel_size_mm;
    lv.labels = crop_grid(labels->labels, spec, t);
    res.labels = std::move(lv);
  }
  return res;
}

LabelVolume uncrop(const LabelVolume &labels, const CropSpec &spec) {
  const Dims3 c = labels.dims();
  const Dims3 o = spec.original_dims;
  if (spec.pad_z_lo + o.z + spec.pad_z_hi != c.z || spec.x0 + c.x > o.x ||
      spec.y0 + c.y > o.y || spec.x0 < 0 || spec.y0 < 0)
    throw SpecMismatch("crop spec inconsistent with " + c.str() + " -> " + o.str());

  LabelVolume out(o);
  out.voxel_size_mm = labels.voxel_size_mm;
  for (int z = 0; z < o.z; ++z)
    for (int y = 0; y < c.y; ++y)
      for (int x = 0; x < c.x; ++x)
        out.labels(x + spec.x0, y + spec.y0, z) = labels.labels(x, y, z + spec.pad_z_lo);
  return out;
}

MultiModalVolume gaussian_normalize(const MultiModalVolume &vol) {
  MultiModalVolume out = vol;
  for (int m = 0; m < kModalities; ++m) {
    const auto &g = vol.mod[m];
    double sum = 0.0, sum2 = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g[i] == 0.0f)
        continue;
      sum += g[i];
      sum2 += static_cast<double>(g[i]) * g[i];
      ++n;
    }
    if (n == 0)
      throw NoBrainVoxels("modality " + std::to_string(m) + " is all zero");
    const double mean = sum / static_cast<double>(n);
    const double var = std::max(0.0, sum2 / static_cast<double>(n) - mean * mean);
    const double std_dev = std::sqrt(var);

    auto &o = out.mod[m];
    if (std_dev < 1e-6) {
      for (std::size_t i = 0; i < o.size(); ++i)
        if (o[i] != 0.0f)
          o[i] = 0.0f;
      continue;
    }
    for (std::size_t i = 0; i < o.size(); ++i)
      if (o[i] != 0.0f)
        o[i] = static_cast<float>((o[i] - mean) / std_dev);
  }
  return out;
}

} // namespace tumseg
