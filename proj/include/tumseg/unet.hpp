#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "tumseg/loss.hpp"
#include "tumseg/rng.hpp"
#include "tumseg/tensor.hpp"
#include "tumseg/threads.hpp"

namespace tumseg {

struct UNetConfig {
  int depth = 3;        // encoder levels including the bottleneck
  int in_channels = 4;  // one per modality
  int num_classes = 4;  // 2 for the tumour-core network
  int initial_kernel = 3; // first convolution only; 3 axial, 5 sag/cor
  int base_width = 16;  // channels at full resolution, doubling per level
  std::uint64_t seed = 0;

  bool operator==(const UNetConfig &) const = default;

  void validate() const {
    if (depth != 3)
      throw SpecInvalid("only depth-3 networks are supported");
    if (initial_kernel != 3 && initial_kernel != 5)
      throw SpecInvalid("initial_kernel must be 3 or 5");
    if (base_width < 1)
      throw SpecInvalid("base_width must be >= 1");
    if (num_classes < 2)
      throw SpecInvalid("num_classes must be >= 2");
    if (in_channels < 1)
      throw SpecInvalid("in_channels must be >= 1");
  }
};

/// One same-padded square convolution: w is (in_ch*k*k) x out_ch so that the
/// im2col product lands directly in plane-major tensor storage.
template <typename S> struct ConvParam {
  int in_ch = 0, out_ch = 0, k = 3;
  MatX<S> w;
  VecX<S> b;

  void allocate() {
    w = MatX<S>::Zero(in_ch * k * k, out_ch);
    b = VecX<S>::Zero(out_ch);
  }
};

template <typename S> struct UNetParams {
  UNetConfig config;
  // Encoder, bottleneck, decoder, head — declaration order is the
  // serialization and visitation order.
  ConvParam<S> enc1a, enc1b, enc2a, enc2b, botta, bottb;
  ConvParam<S> up1, dec1a, dec1b, up2, dec2a, dec2b, head;
};

template <typename S, typename F> void visit_layers(UNetParams<S> &p, F &&fn) {
  fn("enc1a", p.enc1a);
  fn("enc1b", p.enc1b);
  fn("enc2a", p.enc2a);
  fn("enc2b", p.enc2b);
  fn("botta", p.botta);
  fn("bottb", p.bottb);
  fn("up1", p.up1);
  fn("dec1a", p.dec1a);
  fn("dec1b", p.dec1b);
  fn("up2", p.up2);
  fn("dec2a", p.dec2a);
  fn("dec2b", p.dec2b);
  fn("head", p.head);
}

template <typename S, typename F>
void visit_layers(const UNetParams<S> &p, F &&fn) {
  visit_layers(const_cast<UNetParams<S> &>(p),
               [&fn](const char *name, ConvParam<S> &l) {
                 fn(name, static_cast<const ConvParam<S> &>(l));
               });
}

/// Visits every parameter tensor as a flat span, in serialization order.
template <typename S, typename F>
void visit_param_arrays(UNetParams<S> &p, F &&fn) {
  visit_layers(p, [&fn](const char *name, ConvParam<S> &l) {
    fn(name, l.w.data(), static_cast<std::int64_t>(l.w.size()));
    fn(name, l.b.data(), static_cast<std::int64_t>(l.b.size()));
  });
}

template <typename S> std::int64_t param_count(const UNetParams<S> &p) {
  std::int64_t n = 0;
  visit_layers(p, [&n](const char *, const ConvParam<S> &l) {
    n += l.w.size() + l.b.size();
  });
  return n;
}

/// Allocates a parameter set with the same shapes, all zeros (for gradients
/// and moment accumulators).
template <typename S> UNetParams<S> zeros_like(const UNetParams<S> &src) {
  UNetParams<S> out;
  out.config = src.config;
  visit_layers(out, [&src](const char *name, ConvParam<S> &l) {
    visit_layers(src, [&](const char *sname, const ConvParam<S> &sl) {
      if (std::strcmp(name, sname) == 0) {
        l.in_ch = sl.in_ch;
        l.out_ch = sl.out_ch;
        l.k = sl.k;
        l.allocate();
      }
    });
  });
  return out;
}

template <typename Dst, typename Src>
UNetParams<Dst> cast_params(const UNetParams<Src> &src) {
  UNetParams<Dst> out;
  out.config = src.config;
  auto copy = [](ConvParam<Dst> &d, const ConvParam<Src> &s) {
    d.in_ch = s.in_ch;
    d.out_ch = s.out_ch;
    d.k = s.k;
    d.w = s.w.template cast<Dst>();
    d.b = s.b.template cast<Dst>();
  };
  copy(out.enc1a, src.enc1a);
  copy(out.enc1b, src.enc1b);
  copy(out.enc2a, src.enc2a);
  copy(out.enc2b, src.enc2b);
  copy(out.botta, src.botta);
  copy(out.bottb, src.bottb);
  copy(out.up1, src.up1);
  copy(out.dec1a, src.dec1a);
  copy(out.dec1b, src.dec1b);
  copy(out.up2, src.up2);
  copy(out.dec2a, src.dec2a);
  copy(out.dec2b, src.dec2b);
  copy(out.head, src.head);
  return out;
}

/// He fan-in initialisation: weights ~ N(0, 2/fan_in), zero biases.
/// Deterministic in config.seed.
template <typename S> UNetParams<S> init_params(const UNetConfig &cfg) {
  cfg.validate();
  const int W = cfg.base_width;
  UNetParams<S> p;
  p.config = cfg;
  auto shape = [](ConvParam<S> &l, int in, int out, int k) {
    l.in_ch = in;
    l.out_ch = out;
    l.k = k;
    l.allocate();
  };
  shape(p.enc1a, cfg.in_channels, W, cfg.initial_kernel);
  shape(p.enc1b, W, W, 3);
  shape(p.enc2a, W, 2 * W, 3);
  shape(p.enc2b, 2 * W, 2 * W, 3);
  shape(p.botta, 2 * W, 4 * W, 3);
  shape(p.bottb, 4 * W, 4 * W, 3);
  shape(p.up1, 4 * W, 2 * W, 3);
  shape(p.dec1a, 4 * W, 2 * W, 3); // after skip concat
  shape(p.dec1b, 2 * W, 2 * W, 3);
  shape(p.up2, 2 * W, W, 3);
  shape(p.dec2a, 2 * W, W, 3); // after skip concat
  shape(p.dec2b, W, W, 3);
  shape(p.head, W, cfg.num_classes, 1);

  Rng rng(cfg.seed);
  visit_layers(p, [&rng](const char *, ConvParam<S> &l) {
    const double stddev = std::sqrt(2.0 / double(l.w.rows()));
    for (std::int64_t i = 0; i < l.w.size(); ++i)
      l.w.data()[i] = S(rng.normal() * stddev);
  });
  return p;
}

namespace detail {

/// Unrolls one sample's padded receptive fields into K so the convolution is
/// a single GEMM: K is (h*w) x (in_ch*k*k), column j = c*k*k + di*k + dj, and
/// K(row*w+col, j) = X[c](row+di-pad, col+dj-pad) with zeros outside.
template <typename S>
void im2col(const Tensor4<S> &x, int n, int k, MatX<S> &K) {
  const int H = x.dims().h, W = x.dims().w, C = x.dims().c;
  const int pad = k / 2;
  K.setZero(std::int64_t(H) * W, std::int64_t(C) * k * k);
  for (int c = 0; c < C; ++c) {
    auto src = x.plane(n, c);
    for (int di = 0; di < k; ++di) {
      const int hlo = std::max(0, pad - di), hhi = std::min(H, H + pad - di);
      for (int dj = 0; dj < k; ++dj) {
        auto col = K.col(std::int64_t(c) * k * k + di * k + dj);
        const int wlo = std::max(0, pad - dj), whi = std::min(W, W + pad - dj);
        if (wlo >= whi)
          continue;
        for (int h = hlo; h < hhi; ++h)
          col.segment(std::int64_t(h) * W + wlo, whi - wlo) =
              src.segment(std::int64_t(h + di - pad) * W + wlo + dj - pad,
                          whi - wlo)
                  .matrix();
      }
    }
  }
}

/// Scatter-add adjoint of im2col.
template <typename S>
void col2im_add(const MatX<S> &dK, int n, int k, Tensor4<S> &dx) {
  const int H = dx.dims().h, W = dx.dims().w, C = dx.dims().c;
  const int pad = k / 2;
  for (int c = 0; c < C; ++c) {
    auto dst = dx.plane(n, c);
    for (int di = 0; di < k; ++di) {
      const int hlo = std::max(0, pad - di), hhi = std::min(H, H + pad - di);
      for (int dj = 0; dj < k; ++dj) {
        auto col = dK.col(std::int64_t(c) * k * k + di * k + dj);
        const int wlo = std::max(0, pad - dj), whi = std::min(W, W + pad - dj);
        if (wlo >= whi)
          continue;
        for (int h = hlo; h < hhi; ++h)
          dst.segment(std::int64_t(h + di - pad) * W + wlo + dj - pad,
                      whi - wlo) += col.segment(std::int64_t(h) * W + wlo,
                                                whi - wlo)
                                        .array();
      }
    }
  }
}

template <typename S>
Tensor4<S> conv_forward(const ConvParam<S> &layer, const Tensor4<S> &x,
                        bool relu) {
  if (x.dims().c != layer.in_ch)
    throw ShapeMismatch("conv: input channels " + std::to_string(x.dims().c) +
                        " vs " + std::to_string(layer.in_ch));
  Tensor4<S> y(x.dims().n, layer.out_ch, x.dims().h, x.dims().w);
  parallel_for(x.dims().n, [&](int n) {
    MatX<S> K;
    im2col(x, n, layer.k, K);
    auto Y = y.sample(n);
    Y.noalias() = K * layer.w;
    Y.rowwise() += layer.b.transpose();
    if (relu)
      Y = Y.cwiseMax(S(0));
  });
  return y;
}

/// Backward through conv(+ReLU). y is the forward output (post-activation),
/// dy its upstream gradient. Accumulates weight gradients into grad and
/// returns the input gradient. Per-sample partials are reduced in sample
/// order so thread count cannot change the result.
template <typename S>
Tensor4<S> conv_backward(const ConvParam<S> &layer, const Tensor4<S> &x,
                         const Tensor4<S> &y, const Tensor4<S> &dy, bool relu,
                         ConvParam<S> &grad) {
  Tensor4<S> dx(x.dims());
  const int N = x.dims().n;
  std::vector<MatX<S>> gw(N);
  std::vector<VecX<S>> gb(N);
  parallel_for(N, [&](int n) {
    MatX<S> dY = dy.sample(n);
    if (relu) {
      auto Y = y.sample(n);
      dY = (Y.array() > S(0)).select(dY, MatX<S>::Zero(dY.rows(), dY.cols()));
    }
    MatX<S> K;
    im2col(x, n, layer.k, K);
    gw[n].noalias() = K.transpose() * dY;
    gb[n] = dY.colwise().sum().transpose();
    MatX<S> dK;
    dK.noalias() = dY * layer.w.transpose();
    col2im_add(dK, n, layer.k, dx);
  });
  for (int n = 0; n < N; ++n) {
    grad.w += gw[n];
    grad.b += gb[n];
  }
  return dx;
}

/// 2x2 max-pool; idx records each winner's flat pixel index in the input
/// plane (first maximum in scan order on ties).
template <typename S>
Tensor4<S> maxpool2(const Tensor4<S> &x, std::vector<std::int32_t> &idx) {
  const Dims4 d = x.dims();
  Tensor4<S> y(d.n, d.c, d.h / 2, d.w / 2);
  idx.assign(y.dims().count(), 0);
  parallel_for(d.n, [&](int n) {
    for (int c = 0; c < d.c; ++c) {
      auto src = x.plane(n, c);
      auto dst = y.plane(n, c);
      std::int32_t *ip =
          idx.data() + (std::int64_t(n) * d.c + c) * dst.size();
      for (int h = 0; h < d.h / 2; ++h)
        for (int w = 0; w < d.w / 2; ++w) {
          std::int32_t best = 2 * h * d.w + 2 * w;
          S bv = src[best];
          const std::int32_t cand[3] = {best + 1, best + d.w,
                                        best + d.w + 1};
          for (std::int32_t cd : cand)
            if (src[cd] > bv) {
              bv = src[cd];
              best = cd;
            }
          dst[std::int64_t(h) * (d.w / 2) + w] = bv;
          ip[std::int64_t(h) * (d.w / 2) + w] = best;
        }
    }
  });
  return y;
}

template <typename S>
void maxpool2_backward_add(const Tensor4<S> &dy,
                           const std::vector<std::int32_t> &idx,
                           Tensor4<S> &dx) {
  const Dims4 d = dy.dims();
  parallel_for(d.n, [&](int n) {
    for (int c = 0; c < d.c; ++c) {
      auto g = dy.plane(n, c);
      auto dst = dx.plane(n, c);
      const std::int32_t *ip =
          idx.data() + (std::int64_t(n) * d.c + c) * g.size();
      for (std::int64_t p = 0; p < g.size(); ++p)
        dst[ip[p]] += g[p];
    }
  });
}

/// Nearest-neighbour 2x upsample.
template <typename S> Tensor4<S> upsample2(const Tensor4<S> &x) {
  const Dims4 d = x.dims();
  Tensor4<S> y(d.n, d.c, d.h * 2, d.w * 2);
  parallel_for(d.n, [&](int n) {
    for (int c = 0; c < d.c; ++c) {
      auto src = x.plane(n, c);
      auto dst = y.plane(n, c);
      for (int h = 0; h < 2 * d.h; ++h)
        for (int w = 0; w < 2 * d.w; ++w)
          dst[std::int64_t(h) * 2 * d.w + w] =
              src[std::int64_t(h / 2) * d.w + w / 2];
    }
  });
  return y;
}

template <typename S> Tensor4<S> upsample2_backward(const Tensor4<S> &dy) {
  const Dims4 d = dy.dims();
  Tensor4<S> dx(d.n, d.c, d.h / 2, d.w / 2);
  parallel_for(d.n, [&](int n) {
    for (int c = 0; c < d.c; ++c) {
      auto g = dy.plane(n, c);
      auto dst = dx.plane(n, c);
      for (int h = 0; h < d.h; ++h)
        for (int w = 0; w < d.w; ++w)
          dst[std::int64_t(h / 2) * (d.w / 2) + w / 2] +=
              g[std::int64_t(h) * d.w + w];
    }
  });
  return dx;
}

/// Channel concatenation [a | b].
template <typename S>
Tensor4<S> concat_channels(const Tensor4<S> &a, const Tensor4<S> &b) {
  const Dims4 da = a.dims(), db = b.dims();
  if (da.n != db.n || da.h != db.h || da.w != db.w)
    throw ShapeMismatch("concat: " + da.str() + " vs " + db.str());
  Tensor4<S> y(da.n, da.c + db.c, da.h, da.w);
  parallel_for(da.n, [&](int n) {
    for (int c = 0; c < da.c; ++c)
      y.plane(n, c) = a.plane(n, c);
    for (int c = 0; c < db.c; ++c)
      y.plane(n, da.c + c) = b.plane(n, c);
  });
  return y;
}

template <typename S>
void split_channels(const Tensor4<S> &cat, Tensor4<S> &da, Tensor4<S> &db) {
  parallel_for(cat.dims().n, [&](int n) {
    for (int c = 0; c < da.dims().c; ++c)
      da.plane(n, c) = cat.plane(n, c);
    for (int c = 0; c < db.dims().c; ++c)
      db.plane(n, c) = cat.plane(n, da.dims().c + c);
  });
}

} // namespace detail

/// Row-stable softmax over the channel axis.
template <typename S> Tensor4<S> softmax_channels(const Tensor4<S> &logits) {
  Tensor4<S> probs(logits.dims());
  parallel_for(logits.dims().n, [&](int n) {
    auto L = logits.sample(n);
    auto P = probs.sample(n);
    VecX<S> mx = L.rowwise().maxCoeff();
    P = ((L.colwise() - mx).array().exp()).matrix();
    VecX<S> sums = P.rowwise().sum();
    P.array().colwise() /= sums.array();
  });
  return probs;
}

/// Everything backward needs: inputs of every convolution, post-activation
/// outputs for the ReLU masks, and pooling winners. Tied to the parameter
/// set that produced it via the config snapshot.
template <typename S> struct UNetCache {
  UNetConfig config;
  Tensor4<S> input;
  Tensor4<S> e1a, e1b, p1, e2a, e2b, p2, ba, bb;
  std::vector<std::int32_t> idx1, idx2;
  Tensor4<S> u1, u1c, c1, d1a, d1b;
  Tensor4<S> u2, u2c, c2, d2a, d2b;
  Tensor4<S> logits;
};

/// Forward pass; returns per-pixel class probabilities and fills the cache.
template <typename S>
Tensor4<S> forward(const UNetParams<S> &params, const Tensor4<S> &input,
                   UNetCache<S> *cache = nullptr) {
  const Dims4 d = input.dims();
  if (d.c != params.config.in_channels)
    throw ShapeMismatch("forward: " + std::to_string(d.c) +
                        " input channels, network expects " +
                        std::to_string(params.config.in_channels));
  if (d.h % 4 != 0 || d.w % 4 != 0 || d.h < 8 || d.w < 8)
    throw ShapeMismatch("forward: spatial dims must be multiples of 4 and "
                        ">= 8, got " +
                        d.str());
  using detail::concat_channels;
  using detail::conv_forward;
  using detail::maxpool2;
  using detail::upsample2;

  UNetCache<S> local;
  UNetCache<S> &cc = cache ? *cache : local;
  cc.config = params.config;
  cc.input = input;
  cc.e1a = conv_forward(params.enc1a, input, true);
  cc.e1b = conv_forward(params.enc1b, cc.e1a, true);
  cc.p1 = maxpool2(cc.e1b, cc.idx1);
  cc.e2a = conv_forward(params.enc2a, cc.p1, true);
  cc.e2b = conv_forward(params.enc2b, cc.e2a, true);
  cc.p2 = maxpool2(cc.e2b, cc.idx2);
  cc.ba = conv_forward(params.botta, cc.p2, true);
  cc.bb = conv_forward(params.bottb, cc.ba, true);
  cc.u1 = upsample2(cc.bb);
  cc.u1c = conv_forward(params.up1, cc.u1, true);
  cc.c1 = concat_channels(cc.u1c, cc.e2b);
  cc.d1a = conv_forward(params.dec1a, cc.c1, true);
  cc.d1b = conv_forward(params.dec1b, cc.d1a, true);
  cc.u2 = upsample2(cc.d1b);
  cc.u2c = conv_forward(params.up2, cc.u2, true);
  cc.c2 = concat_channels(cc.u2c, cc.e1b);
  cc.d2a = conv_forward(params.dec2a, cc.c2, true);
  cc.d2b = conv_forward(params.dec2b, cc.d2a, true);
  cc.logits = conv_forward(params.head, cc.d2b, false);
  return softmax_channels(cc.logits);
}

/// Backpropagates dLoss/dLogits through the cached forward pass.
template <typename S>
UNetParams<S> backward(const UNetParams<S> &params, const UNetCache<S> &cache,
                       const Tensor4<S> &dlogits) {
  if (!(cache.config == params.config))
    throw StaleCache("cache built for a different network configuration");
  if (!(dlogits.dims() == cache.logits.dims()))
    throw StaleCache("upstream gradient " + dlogits.dims().str() +
                     " does not match cached logits " +
                     cache.logits.dims().str());
  using detail::conv_backward;
  using detail::maxpool2_backward_add;
  using detail::split_channels;
  using detail::upsample2_backward;

  UNetParams<S> g = zeros_like(params);
  Tensor4<S> dd2b =
      conv_backward(params.head, cache.d2b, cache.logits, dlogits, false,
                    g.head);
  Tensor4<S> dd2a =
      conv_backward(params.dec2b, cache.d2a, cache.d2b, dd2b, true, g.dec2b);
  Tensor4<S> dc2 =
      conv_backward(params.dec2a, cache.c2, cache.d2a, dd2a, true, g.dec2a);
  Tensor4<S> du2c(cache.u2c.dims()), de1b(cache.e1b.dims());
  split_channels(dc2, du2c, de1b);
  Tensor4<S> du2 =
      conv_backward(params.up2, cache.u2, cache.u2c, du2c, true, g.up2);
  Tensor4<S> dd1b = upsample2_backward(du2);
  Tensor4<S> dd1a =
      conv_backward(params.dec1b, cache.d1a, cache.d1b, dd1b, true, g.dec1b);
  Tensor4<S> dc1 =
      conv_backward(params.dec1a, cache.c1, cache.d1a, dd1a, true, g.dec1a);
  Tensor4<S> du1c(cache.u1c.dims()), de2b(cache.e2b.dims());
  split_channels(dc1, du1c, de2b);
  Tensor4<S> du1 =
      conv_backward(params.up1, cache.u1, cache.u1c, du1c, true, g.up1);
  Tensor4<S> dbb = upsample2_backward(du1);
  Tensor4<S> dba =
      conv_backward(params.bottb, cache.ba, cache.bb, dbb, true, g.bottb);
  Tensor4<S> dp2 =
      conv_backward(params.botta, cache.p2, cache.ba, dba, true, g.botta);
  maxpool2_backward_add(dp2, cache.idx2, de2b); // joins the skip gradient
  Tensor4<S> de2a =
      conv_backward(params.enc2b, cache.e2a, cache.e2b, de2b, true, g.enc2b);
  Tensor4<S> dp1 =
      conv_backward(params.enc2a, cache.p1, cache.e2a, de2a, true, g.enc2a);
  maxpool2_backward_add(dp1, cache.idx1, de1b);
  Tensor4<S> de1a =
      conv_backward(params.enc1b, cache.e1a, cache.e1b, de1b, true, g.enc1b);
  conv_backward(params.enc1a, cache.input, cache.e1a, de1a, true, g.enc1a);
  return g;
}

struct GradCheckReport {
  double max_rel_error = 0;
  std::int64_t num_checked = 0;
};

namespace detail {

template <typename S> struct ParamSpan {
  S *data;
  const S *grad;
  std::int64_t n;
};

/// Central finite differences on sampled coordinates against the supplied
/// analytic gradients. loss_fn re-evaluates the objective at the current
/// parameter values.
template <typename S, typename LossFn>
GradCheckReport grad_check_spans(std::vector<ParamSpan<S>> spans,
                                 LossFn &&loss_fn, int max_checks, double step,
                                 Rng &rng) {
  std::int64_t total = 0;
  for (const auto &sp : spans)
    total += sp.n;
  std::vector<std::int64_t> order(total);
  for (std::int64_t i = 0; i < total; ++i)
    order[i] = i;
  rng.shuffle(order);
  const std::int64_t checks = std::min<std::int64_t>(max_checks, total);

  GradCheckReport rep;
  for (std::int64_t t = 0; t < checks; ++t) {
    std::int64_t j = order[t];
    for (const auto &sp : spans) {
      if (j >= sp.n) {
        j -= sp.n;
        continue;
      }
      const S saved = sp.data[j];
      sp.data[j] = saved + S(step);
      const double lp = loss_fn();
      sp.data[j] = saved - S(step);
      const double lm = loss_fn();
      sp.data[j] = saved;
      const double numeric = (lp - lm) / (2 * step);
      const double analytic = double(sp.grad[j]);
      const double rel = std::abs(analytic - numeric) /
                         std::max(std::abs(analytic) + std::abs(numeric),
                                  1e-6);
      rep.max_rel_error = std::max(rep.max_rel_error, rel);
      ++rep.num_checked;
      break;
    }
  }
  return rep;
}

} // namespace detail

/// Verifies analytic gradients of the soft combined loss against central
/// finite differences on randomly sampled parameters. Run in double
/// precision on a small configuration.
template <typename S>
GradCheckReport grad_check(UNetParams<S> &params, const Batch2D<S> &batch,
                           int max_checks = 200, double step = 1e-5,
                           std::uint64_t seed = 99) {
  UNetCache<S> cache;
  Tensor4<S> probs = forward(params, batch.inputs, &cache);
  Tensor4<S> dlogits;
  combined_loss(probs, batch.targets, DiceMode::Soft, &dlogits);
  UNetParams<S> grads = backward(params, cache, dlogits);

  std::vector<detail::ParamSpan<S>> spans;
  visit_layers(params, [&](const char *name, ConvParam<S> &l) {
    visit_layers(grads, [&](const char *gname, ConvParam<S> &gl) {
      if (std::strcmp(name, gname) == 0) {
        spans.push_back({l.w.data(), gl.w.data(), l.w.size()});
        spans.push_back({l.b.data(), gl.b.data(), l.b.size()});
      }
    });
  });
  auto loss_fn = [&]() {
    Tensor4<S> p = forward(params, batch.inputs);
    return combined_loss(p, batch.targets, DiceMode::Soft).total;
  };
  Rng rng(seed);
  return detail::grad_check_spans(spans, loss_fn, max_checks, step, rng);
}

// ---------------------------------------------------------------------------
// Checkpoint file: little-endian binary. Layout:
//   magic "TSEGNET1"
//   int32  depth, in_channels, num_classes, initial_kernel, base_width
//   uint64 seed
//   per tensor in declaration order: uint32 rank, uint32 dims[rank],
//     float32 payload (matrices column-major)
// Round trips bit-exactly for float parameters.
// ---------------------------------------------------------------------------

inline constexpr char kCheckpointMagic[8] = {'T', 'S', 'E', 'G',
                                             'N', 'E', 'T', '1'};

namespace detail {

template <typename T> void write_pod(std::ostream &os, const T &v) {
  os.write(reinterpret_cast<const char *>(&v), sizeof(T));
}

template <typename T> T read_pod(std::istream &is, const std::string &path) {
  T v{};
  if (!is.read(reinterpret_cast<char *>(&v), sizeof(T)))
    throw TruncatedFile(path);
  return v;
}

} // namespace detail

inline void save_checkpoint(const std::string &path,
                            const UNetParams<float> &params) {
  std::ofstream os(path, std::ios::binary);
  if (!os)
    throw IoFailure("cannot open " + path + " for writing");
  os.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  detail::write_pod(os, std::int32_t(params.config.depth));
  detail::write_pod(os, std::int32_t(params.config.in_channels));
  detail::write_pod(os, std::int32_t(params.config.num_classes));
  detail::write_pod(os, std::int32_t(params.config.initial_kernel));
  detail::write_pod(os, std::int32_t(params.config.base_width));
  detail::write_pod(os, std::uint64_t(params.config.seed));
  visit_layers(params, [&os](const char *, const ConvParam<float> &l) {
    detail::write_pod(os, std::uint32_t(2));
    detail::write_pod(os, std::uint32_t(l.w.rows()));
    detail::write_pod(os, std::uint32_t(l.w.cols()));
    os.write(reinterpret_cast<const char *>(l.w.data()),
             std::streamsize(sizeof(float) * l.w.size()));
    detail::write_pod(os, std::uint32_t(1));
    detail::write_pod(os, std::uint32_t(l.b.size()));
    os.write(reinterpret_cast<const char *>(l.b.data()),
             std::streamsize(sizeof(float) * l.b.size()));
  });
  if (!os)
    throw IoFailure("write failed: " + path);
}

inline UNetParams<float> load_checkpoint(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is)
    throw IoFailure("cannot open " + path);
  char magic[8];
  if (!is.read(magic, sizeof(magic)))
    throw TruncatedFile(path);
  if (std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0)
    throw BadMagic(path);
  UNetConfig cfg;
  cfg.depth = detail::read_pod<std::int32_t>(is, path);
  cfg.in_channels = detail::read_pod<std::int32_t>(is, path);
  cfg.num_classes = detail::read_pod<std::int32_t>(is, path);
  cfg.initial_kernel = detail::read_pod<std::int32_t>(is, path);
  cfg.base_width = detail::read_pod<std::int32_t>(is, path);
  cfg.seed = detail::read_pod<std::uint64_t>(is, path);
  cfg.validate();
  UNetParams<float> p = init_params<float>(cfg);
  visit_layers(p, [&is, &path](const char *name, ConvParam<float> &l) {
    auto read_tensor = [&](float *data, std::int64_t n, std::uint32_t rank,
                           std::uint32_t r0, std::uint32_t c0) {
      if (detail::read_pod<std::uint32_t>(is, path) != rank)
        throw SpecMismatch(std::string("checkpoint tensor rank for ") + name);
      if (detail::read_pod<std::uint32_t>(is, path) != r0 ||
          (rank == 2 && detail::read_pod<std::uint32_t>(is, path) != c0))
        throw SpecMismatch(std::string("checkpoint tensor shape for ") +
                           name);
      if (!is.read(reinterpret_cast<char *>(data),
                   std::streamsize(sizeof(float) * n)))
        throw TruncatedFile(path);
    };
    read_tensor(l.w.data(), l.w.size(), 2, std::uint32_t(l.w.rows()),
                std::uint32_t(l.w.cols()));
    read_tensor(l.b.data(), l.b.size(), 1, std::uint32_t(l.b.size()), 0);
  });
  return p;
}

} // namespace tumseg
