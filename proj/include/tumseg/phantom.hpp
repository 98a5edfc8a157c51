#pragma once

#include <array>
#include <cstdint>
#include <utility>

#include "tumseg/volume.hpp"

namespace tumseg {

/// Synthetic subject: a brain ellipsoid containing a nested-ellipsoid tumour
/// (NCR core, ET rim, ED shell). Intensities are per-tissue means plus
/// Gaussian noise, chosen so ET is brightest in T1-CE and ED brightest in
/// FLAIR — separable the same way the real tissue classes are.
struct PhantomSpec {
  Dims3 dims{64, 64, 64};
  std::array<double, 3> voxel_size_mm{1.0, 1.0, 1.0};

  std::array<double, 3> tumour_centre{32.0, 32.0, 32.0}; // voxel coords
  std::array<double, 3> tumour_axes{10.0, 9.0, 8.0};     // core semi-axes, voxels
  double ncr_fraction = 0.5; // NCR core edge, fraction of the core radius
  double et_fraction = 1.0;  // ET rim edge, fraction of the core radius
  double ed_extent = 1.6;    // ED shell edge, multiple of the core radius

  std::array<double, 3> brain_axes_fraction{0.42, 0.42, 0.42}; // of each dim

  // Mean intensity per tissue, modality order FLAIR, T1, T1-CE, T2.
  std::array<float, kModalities> brain_mean{0.9f, 1.0f, 1.0f, 0.9f};
  std::array<float, kModalities> ncr_mean{1.3f, 0.6f, 0.7f, 1.4f};
  std::array<float, kModalities> ed_mean{2.2f, 0.8f, 0.9f, 1.9f};
  std::array<float, kModalities> et_mean{1.6f, 1.2f, 2.4f, 1.5f};
  float noise_std = 0.15f;

  std::uint64_t seed = 0;

  /// Throws SpecInvalid when a field is out of range.
  void validate() const;
};

/// Varies tumour geometry per (seed, index) around the defaults, keeping the
/// ED shell inside the brain, so a batch of phantoms is heterogeneous but
/// reproducible.
PhantomSpec randomized_phantom_spec(Dims3 dims, std::uint64_t seed,
                                    std::uint64_t index);

/// Deterministic given the spec. Labels use the internal encoding; background
/// intensity is exactly zero so downstream brain masks see only the head.
std::pair<MultiModalVolume, LabelVolume> generate_phantom(const PhantomSpec &spec);

} // namespace tumseg
