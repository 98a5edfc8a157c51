#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "tumseg/errors.hpp"

namespace tumseg {

template <typename S>
using MatX = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <typename S> using VecX = Eigen::Matrix<S, Eigen::Dynamic, 1>;
template <typename S> using ArrX = Eigen::Array<S, Eigen::Dynamic, 1>;

struct Dims4 {
  int n = 0, c = 0, h = 0, w = 0;
  bool operator==(const Dims4 &) const = default;
  std::int64_t count() const {
    return std::int64_t(n) * c * std::int64_t(h) * w;
  }
  std::string str() const {
    return std::to_string(n) + "x" + std::to_string(c) + "x" +
           std::to_string(h) + "x" + std::to_string(w);
  }
};

/// Minibatch of 2D feature maps. Each channel is a contiguous pixel-major
/// plane (pixel p = row*w + col), channels contiguous within a sample, so a
/// sample views directly as an (h*w) x c column-major matrix — the natural
/// output layout of the im2col GEMM.
template <typename S> class Tensor4 {
public:
  Tensor4() = default;
  explicit Tensor4(Dims4 d) : dims_(d), data_(ArrX<S>::Zero(d.count())) {}
  Tensor4(int n, int c, int h, int w) : Tensor4(Dims4{n, c, h, w}) {}

  const Dims4 &dims() const { return dims_; }
  std::int64_t plane_size() const { return std::int64_t(dims_.h) * dims_.w; }

  Eigen::Map<MatX<S>> sample(int n) {
    return {data_.data() + std::int64_t(n) * dims_.c * plane_size(),
            plane_size(), dims_.c};
  }
  Eigen::Map<const MatX<S>> sample(int n) const {
    return {data_.data() + std::int64_t(n) * dims_.c * plane_size(),
            plane_size(), dims_.c};
  }

  Eigen::Map<ArrX<S>> plane(int n, int c) {
    return {data_.data() + (std::int64_t(n) * dims_.c + c) * plane_size(),
            plane_size()};
  }
  Eigen::Map<const ArrX<S>> plane(int n, int c) const {
    return {data_.data() + (std::int64_t(n) * dims_.c + c) * plane_size(),
            plane_size()};
  }

  S &at(int n, int c, int h, int w) {
    return data_[((std::int64_t(n) * dims_.c + c) * dims_.h + h) * dims_.w +
                 w];
  }
  S at(int n, int c, int h, int w) const {
    return data_[((std::int64_t(n) * dims_.c + c) * dims_.h + h) * dims_.w +
                 w];
  }

  ArrX<S> &array() { return data_; }
  const ArrX<S> &array() const { return data_; }
  void set_zero() { data_.setZero(); }

private:
  Dims4 dims_;
  ArrX<S> data_;
};

template <typename S>
void require_same_dims(const Tensor4<S> &a, const Tensor4<S> &b,
                       const std::string &what) {
  if (!(a.dims() == b.dims()))
    throw ShapeMismatch(what + ": " + a.dims().str() + " vs " +
                        b.dims().str());
}

/// Class-index targets for a minibatch, one label per pixel,
/// index t = (n*h + row)*w + col.
struct TargetArr {
  Dims4 dims; // c is the number of classes, not a storage axis
  Eigen::Array<std::uint8_t, Eigen::Dynamic, 1> labels;

  TargetArr() = default;
  TargetArr(int n, int num_classes, int h, int w)
      : dims{n, num_classes, h, w},
        labels(Eigen::Array<std::uint8_t, Eigen::Dynamic, 1>::Zero(
            std::int64_t(n) * h * w)) {}

  std::uint8_t &at(int n, int h, int w) {
    return labels[(std::int64_t(n) * dims.h + h) * dims.w + w];
  }
  std::uint8_t at(int n, int h, int w) const {
    return labels[(std::int64_t(n) * dims.h + h) * dims.w + w];
  }
};

template <typename S> struct Batch2D {
  Tensor4<S> inputs;
  TargetArr targets;
};

} // namespace tumseg
