#include "tumseg/phantom.hpp"

#include <algorithm>
#include <cmath>

#include "tumseg/rng.hpp"

namespace tumseg {

void PhantomSpec::validate() const {
  if (dims.x < 8 || dims.y < 8 || dims.z < 8)
    throw SpecInvalid("phantom dims must be at least 8 per axis, got " + dims.str());
  for (double v : voxel_size_mm)
    if (!(v > 0.0))
      throw SpecInvalid("voxel size must be positive");
  for (double a : tumour_axes)
    if (!(a > 0.0))
      throw SpecInvalid("tumour axes must be positive");
  if (!(ncr_fraction > 0.0 && ncr_fraction < et_fraction && et_fraction <= 1.0))
    throw SpecInvalid("layer fractions must satisfy 0 < ncr < et <= 1");
  if (!(ed_extent > 1.0))
    throw SpecInvalid("ed_extent must reach beyond the core radius (> 1)");
  for (double f : brain_axes_fraction)
    if (!(f > 0.0 && f <= 0.5))
      throw SpecInvalid("brain_axes_fraction must be in (0, 0.5]");
  const auto finite = [](const std::array<float, kModalities> &m) {
    return std::all_of(m.begin(), m.end(),
                       [](float v) { return std::isfinite(v); });
  };
  if (!finite(brain_mean) || !finite(ncr_mean) || !finite(ed_mean) ||
      !finite(et_mean))
    throw SpecInvalid("tissue means must be finite");
  if (!std::isfinite(noise_std) || noise_std < 0.0f)
    throw SpecInvalid("noise_std must be finite and non-negative");
}

PhantomSpec randomized_phantom_spec(Dims3 dims, std::uint64_t seed,
                                    std::uint64_t index) {
  PhantomSpec spec;
  spec.dims = dims;
  spec.seed = substream_seed(seed, index, 1);

  Rng rng(substream_seed(seed, index, 0));
  const double min_dim = std::min({double(dims.x), double(dims.y), double(dims.z)});
  const std::array<double, 3> mid = {(dims.x - 1) / 2.0, (dims.y - 1) / 2.0,
                                     (dims.z - 1) / 2.0};
  const std::array<double, 3> dim_d = {double(dims.x), double(dims.y),
                                       double(dims.z)};
  for (int d = 0; d < 3; ++d)
    spec.tumour_axes[d] = rng.uniform(0.09, 0.14) * min_dim;
  // Sufficient containment: sum_d ((|offset_d| + reach_d) / brain_d)^2 <= 1
  // keeps every ED-surface point inside the brain ellipsoid. Budget each
  // axis a third of 0.94 and jitter the centre within the leftover slack.
  const double per_axis = std::sqrt(0.94 / 3.0);
  for (int d = 0; d < 3; ++d) {
    const double brain = spec.brain_axes_fraction[d] * dim_d[d];
    const double reach = spec.tumour_axes[d] * spec.ed_extent;
    const double slack = std::max(0.0, per_axis * brain - reach);
    spec.tumour_centre[d] = mid[d] + rng.uniform(-slack, slack);
  }
  return spec;
}

std::pair<MultiModalVolume, LabelVolume> generate_phantom(const PhantomSpec &spec) {
  spec.validate();
  MultiModalVolume vol(spec.dims);
  vol.voxel_size_mm = spec.voxel_size_mm;
  LabelVolume lab(spec.dims);
  lab.voxel_size_mm = spec.voxel_size_mm;

  const std::array<double, 3> mid = {(spec.dims.x - 1) / 2.0,
                                     (spec.dims.y - 1) / 2.0,
                                     (spec.dims.z - 1) / 2.0};
  const std::array<double, 3> brain_axes = {
      spec.brain_axes_fraction[0] * spec.dims.x,
      spec.brain_axes_fraction[1] * spec.dims.y,
      spec.brain_axes_fraction[2] * spec.dims.z};

  Rng rng(spec.seed);
  const std::size_t n = lab.labels.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = lab.labels.coords(i);
    double tumour_r2 = 0.0, brain_r2 = 0.0;
    for (int d = 0; d < 3; ++d) {
      const double dt = (c[d] - spec.tumour_centre[d]) / spec.tumour_axes[d];
      const double db = (c[d] - mid[d]) / brain_axes[d];
      tumour_r2 += dt * dt;
      brain_r2 += db * db;
    }
    const double rho = std::sqrt(tumour_r2);
    const std::array<float, kModalities> *mean = nullptr;
    std::uint8_t label = kBackground;
    if (rho <= spec.ncr_fraction) {
      label = kNcrNet;
      mean = &spec.ncr_mean;
    } else if (rho <= spec.et_fraction) {
      label = kEnhancing;
      mean = &spec.et_mean;
    } else if (rho <= spec.ed_extent) {
      label = kEdema;
      mean = &spec.ed_mean;
    } else if (brain_r2 <= 1.0) {
      mean = &spec.brain_mean;
    }
    lab.labels[i] = label;
    if (mean != nullptr)
      for (int m = 0; m < kModalities; ++m)
        vol.mod[m][i] = (*mean)[m] + spec.noise_std * float(rng.normal());
  }
  return {std::move(vol), std::move(lab)};
}

} // namespace tumseg
