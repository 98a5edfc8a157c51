#include "tumseg/planes.hpp"

#include <algorithm>

namespace tumseg {

PlaneShape plane_shape(Plane plane, Dims3 dims) {
  switch (plane) {
  case Plane::Axial:
    return {dims.x, dims.y, dims.z};
  case Plane::Sagittal:
    return {dims.y, dims.z, dims.x};
  default:
    return {dims.x, dims.z, dims.y};
  }
}

Plane parse_plane(const std::string &name) {
  if (name == "axial")
    return Plane::Axial;
  if (name == "sagittal")
    return Plane::Sagittal;
  if (name == "coronal")
    return Plane::Coronal;
  throw ConfigError("unknown plane: '" + name + "'");
}

namespace {

void check_grid(Dims3 d) {
  if (d.x < 8 || d.y < 8 || d.z < 8 || d.x % 4 || d.y % 4 || d.z % 4)
    throw NonStandardGrid("grid " + d.str() +
                          " is not sliceable (extents must be multiples of 4, >= 8)");
}

template <typename Fetch>
SliceStack extract_generic(Dims3 d, Plane plane, int channels, Fetch fetch) {
  check_grid(d);
  const PlaneShape ps = plane_shape(plane, d);
  SliceStack stack;
  stack.plane = plane;
  stack.grid_dims = d;
  stack.slices.resize(ps.count);
  for (int s = 0; s < ps.count; ++s) {
    Slice2D &sl = stack.slices[s];
    sl.index = s;
    sl.rows = ps.rows;
    sl.cols = ps.cols;
    sl.channels.assign(channels, Eigen::ArrayXf(ps.rows * ps.cols));
  }
  for (int z = 0; z < d.z; ++z)
    for (int y = 0; y < d.y; ++y)
      for (int x = 0; x < d.x; ++x) {
        const auto [s, r, c] = plane_coords(plane, x, y, z);
        Slice2D &sl = stack.slices[s];
        for (int ch = 0; ch < channels; ++ch)
          sl.at(ch, r, c) = fetch(ch, x, y, z);
      }
  return stack;
}

} // namespace

SliceStack extract_slices(const MultiModalVolume &vol, Plane plane) {
  return extract_generic(vol.dims(), plane, kModalities,
                         [&](int ch, int x, int y, int z) {
                           return vol.mod[ch](x, y, z);
                         });
}

SliceStack extract_label_slices(const GridU8 &labels, Plane plane) {
  return extract_generic(labels.dims(), plane, 1,
                         [&](int, int x, int y, int z) {
                           return static_cast<float>(labels(x, y, z));
                         });
}

ProbVolume assemble_probs(const SliceStack &stack, Plane plane) {
  const Dims3 d = stack.grid_dims;
  check_grid(d);
  const PlaneShape ps = plane_shape(plane, d);

  std::vector<const Slice2D *> by_index(ps.count, nullptr);
  for (const auto &sl : stack.slices) {
    if (sl.index < 0 || sl.index >= ps.count || by_index[sl.index])
      throw IncompleteStack("bad or duplicate slice index " + std::to_string(sl.index));
    if (sl.rows != ps.rows || sl.cols != ps.cols)
      throw ShapeMismatch("slice " + std::to_string(sl.index) + " is " +
                          std::to_string(sl.rows) + "x" + std::to_string(sl.cols));
    by_index[sl.index] = &sl;
  }
  for (int s = 0; s < ps.count; ++s)
    if (!by_index[s])
      throw IncompleteStack("missing slice " + std::to_string(s) + " of " +
                            std::to_string(ps.count));

  const int classes = static_cast<int>(by_index[0]->channels.size());
  ProbVolume out(d, classes);
  for (int z = 0; z < d.z; ++z)
    for (int y = 0; y < d.y; ++y)
      for (int x = 0; x < d.x; ++x) {
        const auto [s, r, c] = plane_coords(plane, x, y, z);
        for (int ch = 0; ch < classes; ++ch)
          out.prob[ch](x, y, z) = by_index[s]->at(ch, r, c);
      }
  return out;
}

ProbVolume average_probs(const std::vector<ProbVolume> &vols) {
  if (vols.empty())
    throw ShapeMismatch("average_probs: empty input");
  const Dims3 d = vols[0].dims();
  const int classes = vols[0].num_classes();
  for (const auto &v : vols) {
    require_same_dims(v.dims(), d, "average_probs");
    if (v.num_classes() != classes)
      throw ShapeMismatch("average_probs: class count mismatch");
  }
  ProbVolume out(d, classes);
  const float inv = 1.0f / static_cast<float>(vols.size());
  for (int ch = 0; ch < classes; ++ch) {
    for (const auto &v : vols)
      out.prob[ch].array() += v.prob[ch].array();
    out.prob[ch].array() *= inv;
  }
  return out;
}

} // namespace tumseg
