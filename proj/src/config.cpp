#include "cdiag/config.hpp"

#include <fstream>
#include <limits>
#include <set>

namespace cdiag {

namespace {

using nlohmann::json;

void known_keys(const json& j, const std::string& path, std::set<std::string> keys) {
  if (!j.is_object()) throw ConfigError(path.empty() ? "$" : path, "expected an object");
  for (const auto& [k, v] : j.items())
    if (!keys.count(k)) throw ConfigError(path.empty() ? k : path + "." + k, "unknown key");
}

double number(const json& j, const std::string& key, double lo, double hi) {
  if (!j.is_number()) throw ConfigError(key, "expected a number");
  double v = j.get<double>();
  if (!(v >= lo && v <= hi))
    throw ConfigError(key, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return v;
}

template <class F>
void opt(const json& j, const std::string& section, const char* key, F&& f) {
  if (j.contains(key)) f(j.at(key), section + "." + key);
}

}  // namespace

Config config_from_json(const json& j) {
  Config c;
  known_keys(j, "", {"sla", "dialog", "classifier", "interpreter", "ingest"});
  const double inf = std::numeric_limits<double>::infinity();
  if (j.contains("sla")) {
    const json& s = j.at("sla");
    known_keys(s, "sla", {"prior", "learn_rate", "slip", "guess", "emotion_factors", "smoothing"});
    opt(s, "sla", "prior", [&](const json& v, const std::string& k) { c.sla.prior = number(v, k, 0, 1); });
    opt(s, "sla", "learn_rate", [&](const json& v, const std::string& k) { c.sla.learn_rate = number(v, k, 0, 1); });
    opt(s, "sla", "slip", [&](const json& v, const std::string& k) { c.sla.slip = number(v, k, 0, 1); });
    opt(s, "sla", "guess", [&](const json& v, const std::string& k) { c.sla.guess = number(v, k, 0, 1); });
    opt(s, "sla", "smoothing", [&](const json& v, const std::string& k) { c.sla.smoothing = number(v, k, 1e-9, inf); });
    opt(s, "sla", "emotion_factors", [&](const json& v, const std::string& k) {
      if (!v.is_object()) throw ConfigError(k, "expected an object");
      for (const auto& [name, f] : v.items()) {
        auto e = emotion_from_name(name);
        if (!e) throw ConfigError(k + "." + name, "unknown emotion");
        c.sla.emotion_factor[static_cast<size_t>(*e)] = number(f, k + "." + name, 0, 1);
      }
    });
  }
  c.dialog.sla = c.sla;
  c.classifier.sla = c.sla;
  if (j.contains("dialog")) {
    const json& d = j.at("dialog");
    known_keys(d, "dialog", {"alpha", "beta", "lambda", "max_iteration", "threshold"});
    opt(d, "dialog", "alpha", [&](const json& v, const std::string& k) { c.dialog.alpha = number(v, k, 1e-12, inf); });
    opt(d, "dialog", "beta", [&](const json& v, const std::string& k) { c.dialog.beta = number(v, k, 1e-12, inf); });
    opt(d, "dialog", "lambda", [&](const json& v, const std::string& k) { c.dialog.lambda = number(v, k, 1e-12, inf); });
    opt(d, "dialog", "threshold", [&](const json& v, const std::string& k) { c.dialog.threshold = number(v, k, 0, 1); });
    opt(d, "dialog", "max_iteration", [&](const json& v, const std::string& k) {
      if (!v.is_number_integer()) throw ConfigError(k, "expected an integer");
      c.dialog.max_iteration = static_cast<int>(number(v, k, 1, 10000));
    });
  }
  if (j.contains("classifier")) {
    const json& s = j.at("classifier");
    known_keys(s, "classifier", {"severity_increment"});
    opt(s, "classifier", "severity_increment",
        [&](const json& v, const std::string& k) { c.classifier.severity_increment = number(v, k, 0, 1); });
  }
  if (j.contains("interpreter")) {
    const json& s = j.at("interpreter");
    known_keys(s, "interpreter", {"step_limit"});
    opt(s, "interpreter", "step_limit", [&](const json& v, const std::string& k) {
      if (!v.is_number_integer()) throw ConfigError(k, "expected an integer");
      c.exec.step_limit = static_cast<long>(number(v, k, 1, 1e9));
    });
  }
  if (j.contains("ingest")) {
    const json& s = j.at("ingest");
    known_keys(s, "ingest", {"sampling_period"});
    opt(s, "ingest", "sampling_period", [&](const json& v, const std::string& k) {
      if (!v.is_number_integer()) throw ConfigError(k, "expected an integer");
      c.sampling_period = static_cast<std::int64_t>(number(v, k, 1, 1e9));
    });
  }
  return c;
}

json to_json(const Config& c) {
  json emotions = json::object();
  for (int e = 0; e < kEmotionCount; ++e)
    emotions[std::string(emotion_name(static_cast<Emotion>(e)))] = c.sla.emotion_factor[static_cast<size_t>(e)];
  return {
      {"sla",
       {{"prior", c.sla.prior},
        {"learn_rate", c.sla.learn_rate},
        {"slip", c.sla.slip},
        {"guess", c.sla.guess},
        {"smoothing", c.sla.smoothing},
        {"emotion_factors", emotions}}},
      {"dialog",
       {{"alpha", c.dialog.alpha},
        {"beta", c.dialog.beta},
        {"lambda", c.dialog.lambda},
        {"threshold", c.dialog.threshold},
        {"max_iteration", c.dialog.max_iteration}}},
      {"classifier", {{"severity_increment", c.classifier.severity_increment}}},
      {"interpreter", {{"step_limit", c.exec.step_limit}}},
      {"ingest", {{"sampling_period", c.sampling_period}}},
  };
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("$", "cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("$", std::string("invalid JSON: ") + e.what());
  }
  return config_from_json(j);
}

}  // namespace cdiag
