#include "tumseg/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace tumseg {
namespace {

std::string trim(const std::string &s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos)
    return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

template <typename T> T parse_number(const std::string &key, const std::string &v) {
  T out{};
  const char *first = v.data();
  const char *last = v.data() + v.size();
  const auto r = std::from_chars(first, last, out);
  if (r.ec != std::errc{} || r.ptr != last)
    throw ConfigError("config: bad value for " + key + ": '" + v + "'");
  return out;
}

using Setter = std::function<void(RunConfig &, const std::string &, const std::string &)>;

template <typename T, typename Owner>
Setter field(Owner RunConfig::*owner, T Owner::*member) {
  return [owner, member](RunConfig &cfg, const std::string &key,
                         const std::string &value) {
    cfg.*owner.*member = parse_number<T>(key, value);
  };
}

const std::map<std::string, Setter> &setters() {
  static const std::map<std::string, Setter> table = {
      {"train.batch_size", field(&RunConfig::train, &TrainConfig::batch_size)},
      {"train.lr_initial", field(&RunConfig::train, &TrainConfig::lr_initial)},
      {"train.lr_factor", field(&RunConfig::train, &TrainConfig::lr_factor)},
      {"train.lr_step_epochs",
       field(&RunConfig::train, &TrainConfig::lr_step_epochs)},
      {"train.lr_floor", field(&RunConfig::train, &TrainConfig::lr_floor)},
      {"train.epochs", field(&RunConfig::train, &TrainConfig::epochs)},
      {"train.adam_epsilon",
       field(&RunConfig::train, &TrainConfig::adam_epsilon)},
      {"train.adam_beta1", field(&RunConfig::train, &TrainConfig::adam_beta1)},
      {"train.adam_beta2", field(&RunConfig::train, &TrainConfig::adam_beta2)},
      {"train.val_fraction",
       field(&RunConfig::train, &TrainConfig::val_fraction)},
      {"train.seed", field(&RunConfig::train, &TrainConfig::seed)},
      {"augment.translate_lo",
       field(&RunConfig::augment, &AugmentConfig::translate_lo)},
      {"augment.translate_hi",
       field(&RunConfig::augment, &AugmentConfig::translate_hi)},
      {"augment.rotate_lo",
       field(&RunConfig::augment, &AugmentConfig::rotate_lo)},
      {"augment.rotate_hi",
       field(&RunConfig::augment, &AugmentConfig::rotate_hi)},
      {"augment.noise_mean",
       field(&RunConfig::augment, &AugmentConfig::noise_mean)},
      {"augment.noise_var_lo",
       field(&RunConfig::augment, &AugmentConfig::noise_var_lo)},
      {"augment.noise_var_hi",
       field(&RunConfig::augment, &AugmentConfig::noise_var_hi)},
      {"augment.factor", field(&RunConfig::augment, &AugmentConfig::factor)},
      {"net.depth", field(&RunConfig::net, &UNetConfig::depth)},
      {"net.in_channels", field(&RunConfig::net, &UNetConfig::in_channels)},
      {"net.num_classes", field(&RunConfig::net, &UNetConfig::num_classes)},
      {"net.initial_kernel",
       field(&RunConfig::net, &UNetConfig::initial_kernel)},
      {"net.base_width", field(&RunConfig::net, &UNetConfig::base_width)},
      {"net.seed", field(&RunConfig::net, &UNetConfig::seed)},
  };
  return table;
}

} // namespace

RunConfig parse_config(const std::string &text, RunConfig base) {
  std::istringstream in(text);
  std::string line;
  std::set<std::string> seen;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos)
      line.erase(hash);
    line = trim(line);
    if (line.empty())
      continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key = value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end())
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": unknown key '" + key + "'");
    if (!seen.insert(key).second)
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": duplicate key '" + key + "'");
    it->second(base, key, value);
  }
  base.validate();
  return base;
}

RunConfig load_config(const std::string &path, RunConfig base) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoFailure("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), std::move(base));
}

std::string config_text(const RunConfig &cfg) {
  std::ostringstream out;
  out.precision(17);
  out << "train.batch_size = " << cfg.train.batch_size << "\n";
  out << "train.lr_initial = " << cfg.train.lr_initial << "\n";
  out << "train.lr_factor = " << cfg.train.lr_factor << "\n";
  out << "train.lr_step_epochs = " << cfg.train.lr_step_epochs << "\n";
  out << "train.lr_floor = " << cfg.train.lr_floor << "\n";
  out << "train.epochs = " << cfg.train.epochs << "\n";
  out << "train.adam_epsilon = " << cfg.train.adam_epsilon << "\n";
  out << "train.adam_beta1 = " << cfg.train.adam_beta1 << "\n";
  out << "train.adam_beta2 = " << cfg.train.adam_beta2 << "\n";
  out << "train.val_fraction = " << cfg.train.val_fraction << "\n";
  out << "train.seed = " << cfg.train.seed << "\n";
  out << "augment.translate_lo = " << cfg.augment.translate_lo << "\n";
  out << "augment.translate_hi = " << cfg.augment.translate_hi << "\n";
  out << "augment.rotate_lo = " << cfg.augment.rotate_lo << "\n";
  out << "augment.rotate_hi = " << cfg.augment.rotate_hi << "\n";
  out << "augment.noise_mean = " << cfg.augment.noise_mean << "\n";
  out << "augment.noise_var_lo = " << cfg.augment.noise_var_lo << "\n";
  out << "augment.noise_var_hi = " << cfg.augment.noise_var_hi << "\n";
  out << "augment.factor = " << cfg.augment.factor << "\n";
  out << "net.depth = " << cfg.net.depth << "\n";
  out << "net.in_channels = " << cfg.net.in_channels << "\n";
  out << "net.num_classes = " << cfg.net.num_classes << "\n";
  out << "net.initial_kernel = " << cfg.net.initial_kernel << "\n";
  out << "net.base_width = " << cfg.net.base_width << "\n";
  out << "net.seed = " << cfg.net.seed << "\n";
  return out.str();
}

} // namespace tumseg
