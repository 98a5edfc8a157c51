#pragma once

#include <vector>

#include "tumseg/volume.hpp"

namespace tumseg {

/// Slice-axis convention: axial normal = z, sagittal normal = x,
/// coronal normal = y. Within a slice, (row, col) are the remaining grid
/// axes in (x,y,z) order, so on the 192x192x160 grid axial slices are
/// 192x192 and the other two planes are 192x160.
enum class Plane { Axial, Sagittal, Coronal };

inline const char *plane_name(Plane p) {
  switch (p) {
  case Plane::Axial:
    return "axial";
  case Plane::Sagittal:
    return "sagittal";
  default:
    return "coronal";
  }
}

/// Inverse of plane_name; throws ConfigError on anything else.
Plane parse_plane(const std::string &name);

/// Slice extent (rows, cols) and count for a plane on a given grid.
struct PlaneShape {
  int rows = 0;
  int cols = 0;
  int count = 0;
};
PlaneShape plane_shape(Plane plane, Dims3 dims);

/// One multi-channel 2D slice; channels are modalities or classes.
/// Channel storage is row-major (rows*cols), pixel index = r*cols + c.
struct Slice2D {
  int index = 0; // position along the plane normal
  int rows = 0;
  int cols = 0;
  std::vector<Eigen::ArrayXf> channels;

  float &at(int ch, int r, int c) { return channels[ch][r * cols + c]; }
  float at(int ch, int r, int c) const { return channels[ch][r * cols + c]; }
};

struct SliceStack {
  Plane plane = Plane::Axial;
  Dims3 grid_dims;
  std::vector<Slice2D> slices;
};

/// All slices of a volume along a plane; lossless (each voxel appears in
/// exactly one slice). Grid extents must be multiples of 4 so slices can
/// feed the networks.
SliceStack extract_slices(const MultiModalVolume &vol, Plane plane);

/// Label map sliced with the identical convention, one channel of class ids.
SliceStack extract_label_slices(const GridU8 &labels, Plane plane);

/// Inverse of extraction for C-class probability slices.
ProbVolume assemble_probs(const SliceStack &stack, Plane plane);

/// Voxelwise arithmetic mean; inputs must share dims and class count.
ProbVolume average_probs(const std::vector<ProbVolume> &vols);

/// Voxel (x,y,z) -> (slice index, row, col) for a plane.
inline std::array<int, 3> plane_coords(Plane plane, int x, int y, int z) {
  switch (plane) {
  case Plane::Axial:
    return {z, x, y};
  case Plane::Sagittal:
    return {x, y, z};
  default:
    return {y, x, z};
  }
}

} // namespace tumseg
