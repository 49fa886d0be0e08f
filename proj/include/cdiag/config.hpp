// Run configuration: model priors, emotion modifiers, selection weights,
// sampling period and interpreter limits.
#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "cdiag/classifier.hpp"
#include "cdiag/dialog.hpp"
#include "cdiag/interpreter.hpp"
#include "cdiag/sla.hpp"

namespace cdiag {

/// `key` is the dotted path of the offending entry ("dialog.alpha").
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error("'" + key + "': " + what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct Config {
  SlaParams sla;
  DialogParams dialog;
  ClassifierConfig classifier;
  ExecOptions exec;
  std::int64_t sampling_period = 120;  // seconds
};

/// Every section and key is optional; unknown keys and out-of-range values
/// are rejected.
Config config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Config& c);
Config load_config(const std::string& path);

}  // namespace cdiag
