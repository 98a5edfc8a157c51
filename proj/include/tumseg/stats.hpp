#pragma once

#include <vector>

namespace tumseg {

double mean_of(const std::vector<double> &v);

/// Sample standard deviation (n-1 denominator); 0 for a single value.
double sample_std(const std::vector<double> &v);

/// Linear-interpolation quantile: rank h = (n-1)*q on the sorted values,
/// result = v[floor(h)] + frac(h) * (v[floor(h)+1] - v[floor(h)]).
double quantile(std::vector<double> v, double q);

/// Regularised incomplete beta function I_x(a,b), continued-fraction
/// evaluation, absolute accuracy around 1e-10 for the arguments used here.
double regularized_incomplete_beta(double a, double b, double x);

struct TTestResult {
  double t = 0;
  double p = 1; // two-tailed
};

/// Paired two-tailed t-test on the differences a-b. All-zero differences
/// give t=0, p=1; zero-variance nonzero differences give an infinite t and
/// p=0.
TTestResult paired_t_test(const std::vector<double> &a,
                          const std::vector<double> &b);

} // namespace tumseg
