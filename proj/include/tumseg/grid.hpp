#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string>

#include "tumseg/errors.hpp"

namespace tumseg {

struct Dims3 {
  int x = 0, y = 0, z = 0;

  bool operator==(const Dims3 &) const = default;
  std::size_t count() const {
    return static_cast<std::size_t>(x) * static_cast<std::size_t>(y) *
           static_cast<std::size_t>(z);
  }
  std::string str() const {
    return std::to_string(x) + "x" + std::to_string(y) + "x" + std::to_string(z);
  }
};

/// Dense 3D grid, x fastest (NIfTI order): index = x + X*(y + Y*z).
template <typename Scalar> class Grid3 {
public:
  using Storage = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

  Grid3() = default;
  explicit Grid3(Dims3 d) : dims_(d), data_(Storage::Zero(d.count())) {}
  Grid3(Dims3 d, Scalar fill) : dims_(d), data_(Storage::Constant(d.count(), fill)) {}

  const Dims3 &dims() const { return dims_; }
  std::size_t size() const { return static_cast<std::size_t>(data_.size()); }

  Scalar &operator()(int x, int y, int z) { return data_[index(x, y, z)]; }
  Scalar operator()(int x, int y, int z) const { return data_[index(x, y, z)]; }

  Scalar &operator[](std::size_t i) { return data_[static_cast<Eigen::Index>(i)]; }
  Scalar operator[](std::size_t i) const { return data_[static_cast<Eigen::Index>(i)]; }

  std::size_t index(int x, int y, int z) const {
    return static_cast<std::size_t>(x) +
           static_cast<std::size_t>(dims_.x) *
               (static_cast<std::size_t>(y) +
                static_cast<std::size_t>(dims_.y) * static_cast<std::size_t>(z));
  }
  std::array<int, 3> coords(std::size_t i) const {
    const auto X = static_cast<std::size_t>(dims_.x);
    const auto Y = static_cast<std::size_t>(dims_.y);
    return {static_cast<int>(i % X), static_cast<int>((i / X) % Y),
            static_cast<int>(i / (X * Y))};
  }

  Storage &array() { return data_; }
  const Storage &array() const { return data_; }
  Scalar *data() { return data_.data(); }
  const Scalar *data() const { return data_.data(); }

  bool operator==(const Grid3 &o) const {
    return dims_ == o.dims_ && (data_ == o.data_).all();
  }

private:
  Dims3 dims_;
  Storage data_;
};

using GridF = Grid3<float>;
using GridU8 = Grid3<std::uint8_t>;

inline void require_same_dims(const Dims3 &a, const Dims3 &b, const char *what) {
  if (!(a == b))
    throw ShapeMismatch(std::string(what) + ": " + a.str() + " vs " + b.str());
}

} // namespace tumseg
