#pragma once

#include <stdexcept>
#include <string>

namespace tumseg {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Two grids/tensors that must share a shape do not.
struct ShapeMismatch : Error {
  using Error::Error;
};

/// A label volume contains a code outside its declared encoding.
struct UnknownLabel : Error {
  UnknownLabel(int value, std::size_t voxel)
      : Error("unknown label code " + std::to_string(value) + " at voxel " +
              std::to_string(voxel)),
        value(value), voxel(voxel) {}
  int value;
  std::size_t voxel;
};

/// A volume expected to contain brain tissue is all zero.
struct NoBrainVoxels : Error {
  using Error::Error;
};

/// Input grid too small in x/y for the requested crop window.
struct GridTooSmall : Error {
  using Error::Error;
};

/// Input grid deeper in z than the target grid.
struct GridTooDeep : Error {
  using Error::Error;
};

/// A CropSpec is inconsistent with the volume it is applied to.
struct SpecMismatch : Error {
  using Error::Error;
};

/// Grid dimensions unsuitable for slice-based processing.
struct NonStandardGrid : Error {
  using Error::Error;
};

/// A slice stack has a missing or duplicate slice index.
struct IncompleteStack : Error {
  using Error::Error;
};

/// A backward pass was handed a cache from a different forward pass.
struct StaleCache : Error {
  using Error::Error;
};

struct EmptyModelSet : Error {
  using Error::Error;
};

struct EmptyDataset : Error {
  using Error::Error;
};

struct TooFewSubjects : Error {
  using Error::Error;
};

struct EmptyList : Error {
  using Error::Error;
};

struct LengthMismatch : Error {
  using Error::Error;
};

struct TooFewSamples : Error {
  using Error::Error;
};

/// File does not start with the expected magic bytes.
struct BadMagic : Error {
  using Error::Error;
};

struct UnsupportedDatatype : Error {
  using Error::Error;
};

struct TruncatedFile : Error {
  using Error::Error;
};

struct IoFailure : Error {
  using Error::Error;
};

/// A phantom spec violates its invariants.
struct SpecInvalid : Error {
  using Error::Error;
};

/// Bad key/value in a run configuration file.
struct ConfigError : Error {
  using Error::Error;
};

} // namespace tumseg
