#pragma once

#include <cmath>
#include <vector>

#include "tumseg/unet.hpp"

namespace tumseg {

struct AdamHyper {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-4; // inside the update denominator: sqrt(v_hat) + eps
};

/// First/second moment accumulators, one flat array per parameter tensor in
/// visitation order.
template <typename S> struct AdamState {
  long step = 0;
  std::vector<ArrX<S>> m, v;
};

template <typename S> AdamState<S> make_adam_state(UNetParams<S> &params) {
  AdamState<S> st;
  visit_param_arrays(params, [&st](const char *, S *, std::int64_t n) {
    st.m.push_back(ArrX<S>::Zero(n));
    st.v.push_back(ArrX<S>::Zero(n));
  });
  return st;
}

/// One Adam update with bias-corrected moments:
///   p -= lr * m_hat / (sqrt(v_hat) + eps)
template <typename S>
void adam_step(UNetParams<S> &params, UNetParams<S> &grads, AdamState<S> &st,
               double lr, const AdamHyper &hp = {}) {
  st.step += 1;
  const double bc1 = 1.0 - std::pow(hp.beta1, double(st.step));
  const double bc2 = 1.0 - std::pow(hp.beta2, double(st.step));

  std::vector<std::pair<S *, std::int64_t>> pspans, gspans;
  visit_param_arrays(params, [&pspans](const char *, S *d, std::int64_t n) {
    pspans.emplace_back(d, n);
  });
  visit_param_arrays(grads, [&gspans](const char *, S *d, std::int64_t n) {
    gspans.emplace_back(d, n);
  });
  if (pspans.size() != gspans.size() || pspans.size() != st.m.size())
    throw ShapeMismatch("adam: parameter/gradient/state tensor counts "
                        "disagree");
  for (std::size_t i = 0; i < pspans.size(); ++i) {
    auto [pd, pn] = pspans[i];
    auto [gd, gn] = gspans[i];
    if (pn != gn || pn != st.m[i].size())
      throw ShapeMismatch("adam: tensor " + std::to_string(i) +
                          " size mismatch");
    Eigen::Map<ArrX<S>> p(pd, pn);
    Eigen::Map<const ArrX<S>> g(gd, gn);
    st.m[i] = S(hp.beta1) * st.m[i] + S(1 - hp.beta1) * g;
    st.v[i] = S(hp.beta2) * st.v[i] + S(1 - hp.beta2) * g.square();
    p -= (S(lr) * (st.m[i] / S(bc1)) /
          ((st.v[i] / S(bc2)).sqrt() + S(hp.epsilon)));
  }
}

/// Stepped decay with a floor: lr(e) = max(floor, initial * factor^((e-1)/step)).
/// Epochs are 1-based.
inline double lr_at_epoch(int epoch, double lr_initial = 1e-3,
                          double lr_factor = 0.1, int lr_step_epochs = 2,
                          double lr_floor = 1e-5) {
  const int drops = (epoch - 1) / lr_step_epochs;
  return std::max(lr_floor, lr_initial * std::pow(lr_factor, drops));
}

} // namespace tumseg
