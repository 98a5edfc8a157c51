#include "tumseg/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tumseg/errors.hpp"

namespace tumseg {
namespace {

/// Continued fraction for the incomplete beta function (modified Lentz).
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 1e-14, kTiny = 1e-300;
  const double qab = a + b, qap = a + 1, qam = a - 1;
  double c = 1, d = 1 - qab * x / qap;
  if (std::abs(d) < kTiny)
    d = kTiny;
  d = 1 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1 + aa * d;
    if (std::abs(d) < kTiny)
      d = kTiny;
    c = 1 + aa / c;
    if (std::abs(c) < kTiny)
      c = kTiny;
    d = 1 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1 + aa * d;
    if (std::abs(d) < kTiny)
      d = kTiny;
    c = 1 + aa / c;
    if (std::abs(c) < kTiny)
      c = kTiny;
    d = 1 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1) < kEps)
      break;
  }
  return h;
}

} // namespace

double mean_of(const std::vector<double> &v) {
  if (v.empty())
    throw EmptyList("mean of empty list");
  double s = 0;
  for (double x : v)
    s += x;
  return s / double(v.size());
}

double sample_std(const std::vector<double> &v) {
  if (v.empty())
    throw EmptyList("std of empty list");
  if (v.size() == 1)
    return 0;
  const double m = mean_of(v);
  double s = 0;
  for (double x : v)
    s += (x - m) * (x - m);
  return std::sqrt(s / double(v.size() - 1));
}

double quantile(std::vector<double> v, double q) {
  if (v.empty())
    throw EmptyList("quantile of empty list");
  if (q < 0 || q > 1)
    throw ConfigError("quantile level must be in [0,1]");
  std::sort(v.begin(), v.end());
  const double h = double(v.size() - 1) * q;
  const std::size_t i = std::size_t(h);
  if (i + 1 >= v.size())
    return v.back();
  const double frac = h - double(i);
  return v[i] + frac * (v[i + 1] - v[i]);
}

double regularized_incomplete_beta(double a, double b, double x) {
  if (x <= 0)
    return 0;
  if (x >= 1)
    return 1;
  const double front = std::exp(std::lgamma(a + b) - std::lgamma(a) -
                                std::lgamma(b) + a * std::log(x) +
                                b * std::log1p(-x));
  if (x < (a + 1) / (a + b + 2))
    return front * betacf(a, b, x) / a;
  return 1 - front * betacf(b, a, 1 - x) / b; // symmetry I_x(a,b) = 1 - I_{1-x}(b,a)
}

TTestResult paired_t_test(const std::vector<double> &a,
                          const std::vector<double> &b) {
  if (a.size() != b.size())
    throw LengthMismatch("paired t-test: " + std::to_string(a.size()) +
                         " vs " + std::to_string(b.size()) + " samples");
  if (a.size() < 2)
    throw TooFewSamples("paired t-test needs at least 2 pairs");

  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    d[i] = a[i] - b[i];
  const double dm = mean_of(d);
  const double sd = sample_std(d);
  const double n = double(d.size());

  TTestResult r;
  if (sd == 0) {
    if (dm == 0)
      return r; // identical pairs: t=0, p=1
    r.t = dm > 0 ? std::numeric_limits<double>::infinity()
                 : -std::numeric_limits<double>::infinity();
    r.p = 0;
    return r;
  }
  r.t = dm / (sd / std::sqrt(n));
  const double df = n - 1;
  r.p = regularized_incomplete_beta(df / 2, 0.5, df / (df + r.t * r.t));
  return r;
}

} // namespace tumseg
