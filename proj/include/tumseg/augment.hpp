#pragma once

#include "tumseg/planes.hpp"
#include "tumseg/rng.hpp"

namespace tumseg {

/// Online augmentation: each augmented sample applies exactly one
/// transformation, its parameters drawn uniformly from closed intervals.
struct AugmentConfig {
  double translate_lo = -10, translate_hi = 10; // voxels, per in-slice axis
  double rotate_lo = -10, rotate_hi = 10;       // degrees
  double noise_mean = 0;
  double noise_var_lo = 0.01, noise_var_hi = 0.09;
  int factor = 2; // stream multiplier: 2 = one fresh copy per original

  void validate() const {
    if (translate_lo > translate_hi || rotate_lo > rotate_hi ||
        noise_var_lo > noise_var_hi)
      throw ConfigError("augment: interval bounds reversed");
    if (noise_var_lo < 0)
      throw ConfigError("augment: noise variance must be >= 0");
    if (factor < 1)
      throw ConfigError("augment: factor must be >= 1");
  }
};

/// Shifts slice content by (dr, dc) pixels: the value at (r, c) moves to
/// (r + dr, c + dc). Intensities are interpolated bilinearly, labels
/// nearest-neighbour; pixels mapped from outside the frame become zero.
std::pair<Slice2D, Slice2D> translate_sample(const Slice2D &image,
                                             const Slice2D &labels, double dr,
                                             double dc);

/// Rotates slice content by `degrees` about the slice centre, with the same
/// interpolation and border rules as translate_sample.
std::pair<Slice2D, Slice2D> rotate_sample(const Slice2D &image,
                                          const Slice2D &labels,
                                          double degrees);

/// Draws one of {translate, rotate, noise} and applies it to the image and
/// (for the geometric transforms) identically to the label slice. Noise
/// perturbs intensities only; labels pass through untouched.
///
/// Draw order (fixed for reproducibility): transform selector, then its
/// parameters, then any per-pixel noise in channel-major pixel order.
std::pair<Slice2D, Slice2D> augment_sample(const Slice2D &image,
                                           const Slice2D &labels,
                                           const AugmentConfig &cfg, Rng &rng);

} // namespace tumseg
