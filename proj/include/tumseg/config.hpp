#pragma once

#include <string>

#include "tumseg/augment.hpp"
#include "tumseg/train.hpp"
#include "tumseg/unet.hpp"

namespace tumseg {

/// Everything a training run is parameterised by.
struct RunConfig {
  TrainConfig train;
  AugmentConfig augment;
  UNetConfig net;

  void validate() const {
    train.validate();
    augment.validate();
    net.validate();
  }
};

/// Applies flat `key = value` lines onto `base` and validates the result.
/// Keys are prefixed by owner (`train.epochs`, `augment.factor`,
/// `net.base_width`); `#` starts a comment; unknown keys, duplicate keys and
/// malformed numbers throw ConfigError.
RunConfig parse_config(const std::string &text, RunConfig base = {});

/// parse_config over a file's contents. Throws IoFailure when unreadable.
RunConfig load_config(const std::string &path, RunConfig base = {});

/// Serialises every field as `key = value` lines; parse_config(config_text(c))
/// reproduces c.
std::string config_text(const RunConfig &cfg);

} // namespace tumseg
