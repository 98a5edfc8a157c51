#pragma once

#include <array>
#include <optional>
#include <vector>

#include "tumseg/grid.hpp"

namespace tumseg {

// Internal label codes are contiguous so they double as softmax channels.
enum Label : std::uint8_t {
  kBackground = 0,
  kNcrNet = 1,
  kEdema = 2,
  kEnhancing = 3,
};
inline constexpr int kNumClasses = 4;

// External (on-disk) codes: 0, 1 = NCR/NET, 2 = ED, 4 = ET.
inline constexpr std::uint8_t kExternalCodes[kNumClasses] = {0, 1, 2, 4};

enum class LabelDirection { ExternalToInternal, InternalToExternal };

inline constexpr int kModalities = 4;
enum Modality : int { kFlair = 0, kT1 = 1, kT1ce = 2, kT2 = 3 };

/// Co-registered 4-modality intensity volume (FLAIR, T1, T1-CE, T2).
struct MultiModalVolume {
  std::array<GridF, kModalities> mod;
  std::array<double, 3> voxel_size_mm = {1.0, 1.0, 1.0};

  MultiModalVolume() = default;
  explicit MultiModalVolume(Dims3 d) {
    for (auto &m : mod)
      m = GridF(d);
  }
  const Dims3 &dims() const { return mod[0].dims(); }
  double voxel_volume_mm3() const {
    return voxel_size_mm[0] * voxel_size_mm[1] * voxel_size_mm[2];
  }
};

/// Per-voxel class map. `labels` always holds one encoding at a time; all
/// in-process operations expect the internal one.
struct LabelVolume {
  GridU8 labels;
  std::array<double, 3> voxel_size_mm = {1.0, 1.0, 1.0};

  LabelVolume() = default;
  explicit LabelVolume(Dims3 d) : labels(d) {}
  const Dims3 &dims() const { return labels.dims(); }
  double voxel_volume_mm3() const {
    return voxel_size_mm[0] * voxel_size_mm[1] * voxel_size_mm[2];
  }
};

/// Binary tumour-core mask (ET + NCR/NET).
struct TCMask {
  GridU8 mask;

  TCMask() = default;
  explicit TCMask(Dims3 d) : mask(d) {}
  const Dims3 &dims() const { return mask.dims(); }
  std::size_t count() const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < mask.size(); ++i)
      n += mask[i] != 0;
    return n;
  }
};

/// How a volume was placed onto the working grid. x/y are crop offsets into
/// the original grid; z is zero-padded, split (lo, hi). The working dims are
/// carried by whichever volume the spec travels with.
struct CropSpec {
  int x0 = 0;
  int y0 = 0;
  int pad_z_lo = 0;
  int pad_z_hi = 0;
  Dims3 original_dims;
};

/// Per-class per-voxel probabilities assembled in 3D.
struct ProbVolume {
  std::vector<GridF> prob; // one grid per class

  ProbVolume() = default;
  ProbVolume(Dims3 d, int classes) : prob(classes, GridF(d)) {}
  int num_classes() const { return static_cast<int>(prob.size()); }
  const Dims3 &dims() const { return prob.at(0).dims(); }
};

/// Grid size the preprocessing step normalises to. The clinical default is
/// 192x192x160; synthetic studies use the volume's own (4-divisible) dims.
struct TargetGrid {
  Dims3 dims{192, 192, 160};
};

// volume_core operations --------------------------------------------------

LabelVolume remap_labels(const LabelVolume &vol, LabelDirection direction);

TCMask derive_tc(const LabelVolume &labels);

struct CropResult {
  MultiModalVolume volume;
  std::optional<LabelVolume> labels;
  CropSpec spec;
};

/// Crops x/y so the nonzero bounding-box centre sits at the window centre
/// (shifted minimally to keep the box inside when it fits, then clamped) and
/// zero-pads z to the target depth, extra voxel high.
CropResult crop_to_standard(const MultiModalVolume &vol,
                            const LabelVolume *labels = nullptr,
                            TargetGrid target = {});

/// Inverse of crop_to_standard for label maps: restores original dims,
/// background outside the crop window.
LabelVolume uncrop(const LabelVolume &labels, const CropSpec &spec);

/// Per modality: zero-mean / unit-population-std over the nonzero (brain)
/// voxels; background stays exactly zero. A modality whose brain std is
/// below 1e-6 maps all brain voxels to zero.
MultiModalVolume gaussian_normalize(const MultiModalVolume &vol);

/// Nonzero bounding box across all modalities: {min, max} inclusive per axis.
/// Throws NoBrainVoxels when the volume is all zero.
struct BoundingBox {
  std::array<int, 3> lo;
  std::array<int, 3> hi;
};
BoundingBox brain_bounding_box(const MultiModalVolume &vol);

} // namespace tumseg
