#include "tumseg/augment.hpp"

#include <cmath>

#include "tumseg/errors.hpp"

namespace tumseg {
namespace {

float bilinear(const Eigen::ArrayXf &src, int rows, int cols, double r,
               double c) {
  const int r0 = int(std::floor(r)), c0 = int(std::floor(c));
  const double fr = r - r0, fc = c - c0;
  auto pick = [&](int rr, int cc) -> double {
    if (rr < 0 || rr >= rows || cc < 0 || cc >= cols)
      return 0.0;
    return src[std::int64_t(rr) * cols + cc];
  };
  return float((1 - fr) * ((1 - fc) * pick(r0, c0) + fc * pick(r0, c0 + 1)) +
               fr * ((1 - fc) * pick(r0 + 1, c0) + fc * pick(r0 + 1, c0 + 1)));
}

float nearest(const Eigen::ArrayXf &src, int rows, int cols, double r,
              double c) {
  const int rr = int(std::lround(r)), cc = int(std::lround(c));
  if (rr < 0 || rr >= rows || cc < 0 || cc >= cols)
    return 0.f;
  return src[std::int64_t(rr) * cols + cc];
}

/// Applies output(r,c) = input(map(r,c)) to every channel of both slices.
template <typename MapFn>
void warp(const Slice2D &image, const Slice2D &labels, Slice2D &out_img,
          Slice2D &out_lab, MapFn &&map) {
  const int rows = image.rows, cols = image.cols;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const auto [sr, sc] = map(double(r), double(c));
      const std::int64_t p = std::int64_t(r) * cols + c;
      for (std::size_t ch = 0; ch < image.channels.size(); ++ch)
        out_img.channels[ch][p] =
            bilinear(image.channels[ch], rows, cols, sr, sc);
      for (std::size_t ch = 0; ch < labels.channels.size(); ++ch)
        out_lab.channels[ch][p] =
            nearest(labels.channels[ch], rows, cols, sr, sc);
    }
}

void check_pair(const Slice2D &image, const Slice2D &labels) {
  if (image.rows != labels.rows || image.cols != labels.cols)
    throw ShapeMismatch("augment: image and label slice extents differ");
}

} // namespace

std::pair<Slice2D, Slice2D> translate_sample(const Slice2D &image,
                                             const Slice2D &labels, double dr,
                                             double dc) {
  check_pair(image, labels);
  std::pair<Slice2D, Slice2D> out{image, labels};
  warp(image, labels, out.first, out.second, [dr, dc](double r, double c) {
    return std::pair<double, double>(r - dr, c - dc);
  });
  return out;
}

std::pair<Slice2D, Slice2D> rotate_sample(const Slice2D &image,
                                          const Slice2D &labels,
                                          double degrees) {
  check_pair(image, labels);
  std::pair<Slice2D, Slice2D> out{image, labels};
  const double theta = degrees * M_PI / 180.0;
  const double cr = (image.rows - 1) / 2.0, cc = (image.cols - 1) / 2.0;
  const double cs = std::cos(theta), sn = std::sin(theta);
  warp(image, labels, out.first, out.second,
       [cr, cc, cs, sn](double r, double c) {
         const double dr = r - cr, dc = c - cc;
         // inverse rotation of the output coordinate
         return std::pair<double, double>(cr + cs * dr + sn * dc,
                                          cc - sn * dr + cs * dc);
       });
  return out;
}

std::pair<Slice2D, Slice2D> augment_sample(const Slice2D &image,
                                           const Slice2D &labels,
                                           const AugmentConfig &cfg,
                                           Rng &rng) {
  cfg.validate();
  check_pair(image, labels);

  const int kind = int(rng.uniform_int(0, 2));
  if (kind == 0) {
    const double dr = rng.uniform(cfg.translate_lo, cfg.translate_hi);
    const double dc = rng.uniform(cfg.translate_lo, cfg.translate_hi);
    return translate_sample(image, labels, dr, dc);
  }
  if (kind == 1) {
    const double degrees = rng.uniform(cfg.rotate_lo, cfg.rotate_hi);
    return rotate_sample(image, labels, degrees);
  }
  // additive Gaussian noise, intensities only
  std::pair<Slice2D, Slice2D> out{image, labels};
  const double var = rng.uniform(cfg.noise_var_lo, cfg.noise_var_hi);
  const double stddev = std::sqrt(var);
  for (auto &ch : out.first.channels)
    for (std::int64_t p = 0; p < ch.size(); ++p)
      ch[p] += float(rng.normal(cfg.noise_mean, stddev));
  return out;
}

} // namespace tumseg
