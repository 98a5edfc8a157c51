#pragma once

#include <array>
#include <vector>

#include "tumseg/volume.hpp"

namespace tumseg {

/// Rule thresholds: ET components below this volume are absorbed into
/// NCR/NET; stray ED components are removed when below the volume threshold
/// AND farther than the distance threshold from the largest ED component's
/// centroid. Both comparisons are strict.
inline constexpr double kMinEtVolumeMm3 = 200.0;
inline constexpr double kMinEdVolumeMm3 = 200.0;
inline constexpr double kMaxEdDistanceMm = 75.0;

struct Component {
  std::vector<std::int64_t> voxels;  // flat grid indices
  double volume_mm3 = 0;
  std::array<double, 3> centroid_mm{}; // volume centroid
};

/// Maximal connected sets of the nonzero voxels, ordered by size descending
/// then by lexicographically smallest (x,y,z) voxel.
std::vector<Component>
connected_components(const GridU8 &mask, int connectivity,
                     const std::array<double, 3> &voxel_size_mm = {1, 1, 1});

/// ET components with volume < 200 mm^3 become NCR/NET.
LabelVolume relabel_small_et(const LabelVolume &labels);

/// TC-mask voxels not labeled ET become NCR/NET (TC minus ET).
LabelVolume tc_override(const LabelVolume &labels, const TCMask &tc);

/// Removes small ED components far from the main ED mass: volume < 200 mm^3
/// AND centroid more than 75 mm from the largest ED component's centroid.
LabelVolume clean_ed(const LabelVolume &labels);

/// Background voxels 26-adjacent to both a TC-class voxel (ET or NCR/NET)
/// and an ED voxel become ED; iterated to fixpoint.
LabelVolume fill_tc_ed_interface(const LabelVolume &labels);

/// The full rule pipeline in order: relabel_small_et, tc_override, clean_ed,
/// fill_tc_ed_interface.
LabelVolume postprocess(const LabelVolume &labels, const TCMask &tc);

/// The pipeline without a TC network: relabel_small_et, clean_ed,
/// fill_tc_ed_interface.
LabelVolume postprocess(const LabelVolume &labels);

} // namespace tumseg
