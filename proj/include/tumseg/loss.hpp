#pragma once

#include <cmath>
#include <vector>

#include "tumseg/tensor.hpp"

namespace tumseg {

/// Clamp applied to probabilities inside the log.
inline constexpr double kProbFloor = 1e-12;
/// Smoothing added to both Dice numerator and denominator (empty/empty -> 1).
inline constexpr double kDiceSmooth = 1e-6;

enum class DiceMode { Hard, Soft };

struct LossBreakdown {
  double ce = 0;        // mean -log p_target over batch x pixels
  double dice_term = 0; // -mean(per_class_dice), in [-1, 0]
  double total = 0;     // ce + dice_term
  std::vector<double> per_class_dice;
};

namespace detail {

template <typename S>
void check_loss_shapes(const Tensor4<S> &probs, const TargetArr &targets) {
  const Dims4 &pd = probs.dims();
  const Dims4 &td = targets.dims;
  if (pd.n != td.n || pd.h != td.h || pd.w != td.w || pd.c != td.c)
    throw ShapeMismatch("loss: probs " + pd.str() + " vs targets " +
                        td.str());
  if (pd.c < 2)
    throw ShapeMismatch("loss: need at least 2 classes");
  for (std::int64_t i = 0; i < targets.labels.size(); ++i)
    if (targets.labels[i] >= pd.c)
      throw UnknownLabel(targets.labels[i], i);
}

} // namespace detail

/// Mean over batch x pixels of -log(p at the target class), p clamped below.
template <typename S>
double cross_entropy(const Tensor4<S> &probs, const TargetArr &targets) {
  detail::check_loss_shapes(probs, targets);
  const Dims4 d = probs.dims();
  const std::int64_t plane = std::int64_t(d.h) * d.w;
  double sum = 0;
  for (int n = 0; n < d.n; ++n) {
    auto P = probs.sample(n); // (h*w) x c
    for (std::int64_t p = 0; p < plane; ++p) {
      const int cls = targets.labels[n * plane + p];
      sum -= std::log(std::max<double>(P(p, cls), kProbFloor));
    }
  }
  return sum / double(std::int64_t(d.n) * plane);
}

/// Smoothed Dice overlap between two binary masks; 1.0 when both are empty.
template <typename DerivedA, typename DerivedB>
double dice_score_per_class(const Eigen::ArrayBase<DerivedA> &pred,
                            const Eigen::ArrayBase<DerivedB> &target) {
  if (pred.size() != target.size())
    throw ShapeMismatch("dice: mask sizes " + std::to_string(pred.size()) +
                        " vs " + std::to_string(target.size()));
  double inter = 0, psum = 0, tsum = 0;
  for (std::int64_t i = 0; i < pred.size(); ++i) {
    const double pv = pred(i) != 0 ? 1.0 : 0.0;
    const double tv = target(i) != 0 ? 1.0 : 0.0;
    inter += pv * tv;
    psum += pv;
    tsum += tv;
  }
  return (2.0 * inter + kDiceSmooth) / (psum + tsum + kDiceSmooth);
}

/// Combined loss: CE plus the negated class-mean Dice.
///
/// Hard mode scores Dice on the argmax label map (reporting form, not
/// differentiable). Soft mode substitutes probabilities for the argmax masks
/// and, when dlogits is non-null, also fills the gradient of the total loss
/// with respect to the pre-softmax logits.
template <typename S>
LossBreakdown combined_loss(const Tensor4<S> &probs, const TargetArr &targets,
                            DiceMode mode, Tensor4<S> *dlogits = nullptr) {
  detail::check_loss_shapes(probs, targets);
  const Dims4 d = probs.dims();
  const int C = d.c;
  const std::int64_t plane = std::int64_t(d.h) * d.w;
  const std::int64_t M = std::int64_t(d.n) * plane;

  LossBreakdown out;
  out.per_class_dice.assign(C, 0.0);

  // Batch-wise Dice accumulators per class.
  std::vector<double> inter(C, 0.0), psum(C, 0.0), tsum(C, 0.0);
  double ce_sum = 0;

  for (int n = 0; n < d.n; ++n) {
    auto P = probs.sample(n);
    for (std::int64_t p = 0; p < plane; ++p) {
      const int cls = targets.labels[n * plane + p];
      ce_sum -= std::log(std::max<double>(P(p, cls), kProbFloor));
      tsum[cls] += 1.0;
      if (mode == DiceMode::Soft) {
        inter[cls] += P(p, cls);
        for (int c = 0; c < C; ++c)
          psum[c] += P(p, c);
      } else {
        int arg = 0;
        S best = P(p, 0);
        for (int c = 1; c < C; ++c)
          if (P(p, c) > best) { // ties keep the lowest index
            best = P(p, c);
            arg = c;
          }
        psum[arg] += 1.0;
        if (arg == cls)
          inter[cls] += 1.0;
      }
    }
  }

  out.ce = ce_sum / double(M);
  std::vector<double> num(C), den(C);
  for (int c = 0; c < C; ++c) {
    num[c] = 2.0 * inter[c] + kDiceSmooth;
    den[c] = psum[c] + tsum[c] + kDiceSmooth;
    out.per_class_dice[c] = num[c] / den[c];
    out.dice_term -= out.per_class_dice[c] / C;
  }
  out.total = out.ce + out.dice_term;

  if (dlogits && mode == DiceMode::Soft) {
    *dlogits = Tensor4<S>(d);
    // d(dice_term)/d p_c(x) depends only on (c, [target==c]):
    //   dice_c = N_c / D_c, N_c = 2*sum(p_c*y_c)+eps, D_c = sum p_c + |y_c| + eps
    //   d dice_c / d p_c(x) = (2*y_c(x)*D_c - N_c) / D_c^2, scaled by -1/C.
    std::vector<double> on_target(C), off_target(C);
    for (int c = 0; c < C; ++c) {
      const double d2 = den[c] * den[c];
      on_target[c] = -(2.0 * den[c] - num[c]) / d2 / C;
      off_target[c] = num[c] / d2 / C;
    }
    std::vector<double> dp(C);
    for (int n = 0; n < d.n; ++n) {
      auto P = probs.sample(n);
      auto G = dlogits->sample(n);
      for (std::int64_t p = 0; p < plane; ++p) {
        const int cls = targets.labels[n * plane + p];
        double dot = 0;
        for (int c = 0; c < C; ++c) {
          dp[c] = (c == cls) ? on_target[c] : off_target[c];
          dot += double(P(p, c)) * dp[c];
        }
        for (int c = 0; c < C; ++c) {
          // Softmax Jacobian for the Dice part, plus the fused
          // softmax-cross-entropy gradient (probs - onehot)/M.
          double g = double(P(p, c)) * (dp[c] - dot);
          g += (double(P(p, c)) - (c == cls ? 1.0 : 0.0)) / double(M);
          G(p, c) = S(g);
        }
      }
    }
  }
  return out;
}

} // namespace tumseg
