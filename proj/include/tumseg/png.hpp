#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tumseg/grid.hpp"

namespace tumseg {

/// Minimal 8-bit RGB, non-interlaced PNG. `rgb` is row-major, three bytes per
/// pixel, rows top to bottom. Throws IoFailure on write errors.
void write_png_rgb(const std::string &path, int width, int height,
                   const std::vector<std::uint8_t> &rgb);

/// Renders axial slice `slice_z` of an intensity volume in grayscale
/// (windowed to the 1st–99th percentile of its nonzero voxels) with the
/// internal-encoded labels alpha-blended on top: NCR/NET red, edema green,
/// enhancing tumour yellow.
void write_overlay_png(const std::string &path, const GridF &image,
                       const GridU8 &labels, int slice_z);

} // namespace tumseg
