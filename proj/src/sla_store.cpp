#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cdiag/sla.hpp"

namespace cdiag {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json matrix_json(const TransitionMatrix& m) {
  return json{{"n", m.size()}, {"smoothing", m.smoothing()}, {"counts", m.counts()}};
}

const json& field(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw SchemaViolation(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaViolation(path + "." + key, "missing");
  return *it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw SchemaViolation(path, "expected a number");
  return j.get<double>();
}

double probability(const json& j, const std::string& path) {
  double v = number(j, path);
  if (!(v >= 0.0 && v <= 1.0)) throw SchemaViolation(path, "probability outside [0, 1]");
  return v;
}

std::string string_of(const json& j, const std::string& path) {
  if (!j.is_string()) throw SchemaViolation(path, "expected a string");
  return j.get<std::string>();
}

ConceptId concept_key(const std::string& k, const std::string& path) {
  auto c = concept_from_name(k);
  if (!c) throw SchemaViolation(path, "unknown concept '" + k + "'");
  return *c;
}

std::map<std::string, double> prob_map(const json& j, const std::string& path) {
  if (!j.is_object()) throw SchemaViolation(path, "expected an object");
  std::map<std::string, double> out;
  for (auto it = j.begin(); it != j.end(); ++it)
    out[it.key()] = probability(it.value(), path + "." + it.key());
  return out;
}

TransitionMatrix matrix_of(const json& j, const std::string& path, int expected_n) {
  int n = static_cast<int>(number(field(j, "n", path), path + ".n"));
  if (n != expected_n) throw SchemaViolation(path + ".n", "unexpected dimension");
  double s = number(field(j, "smoothing", path), path + ".smoothing");
  if (!(s > 0)) throw SchemaViolation(path + ".smoothing", "must be positive");
  const json& c = field(j, "counts", path);
  if (!c.is_array() || c.size() != static_cast<size_t>(n) * n)
    throw SchemaViolation(path + ".counts", "expected " + std::to_string(n * n) + " numbers");
  std::vector<double> counts;
  for (size_t i = 0; i < c.size(); ++i) {
    double v = number(c[i], path + ".counts[" + std::to_string(i) + "]");
    if (v < 0) throw SchemaViolation(path + ".counts[" + std::to_string(i) + "]", "negative");
    counts.push_back(v);
  }
  TransitionMatrix m(n, s);
  m.set_counts(std::move(counts));
  return m;
}

}  // namespace

std::string to_json_text(const SlaRecord& r) {
  json j;
  j["schema_version"] = SlaRecord::kSchemaVersion;
  j["student_id"] = r.student_id;
  json known = json::object();
  for (auto& [c, v] : r.known) known[std::string(concept_name(c))] = v;
  j["known"] = known;
  j["adjustment"] = json(r.adjustment);
  j["causal"] = json(r.causal);
  j["psi"] = json(r.psi);
  j["activities"] = matrix_json(r.activities);
  j["questions"] = matrix_json(r.questions);
  json prof = json::object();
  for (auto& [c, s] : r.profile.entries)
    prof[std::string(concept_name(c))] = {{"r", s[0]}, {"e", s[1]}, {"m", s[2]}};
  j["profile"] = prof;
  j["error_types"] = json(r.error_types);
  json em = json::object();
  for (int i = 0; i < kEmotionCount; ++i)
    em[std::string(emotion_name(static_cast<Emotion>(i)))] = r.emotions[i];
  j["emotions"] = em;
  j["social"] = {{"sum", r.social_sum}, {"count", r.social_count}};
  json log = json::array();
  for (auto& e : r.log) log.push_back({{"kind", e.kind}, {"payload", e.payload}});
  j["log"] = log;
  return j.dump(2) + "\n";
}

SlaRecord from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaViolation("$", std::string("not valid JSON: ") + e.what());
  }
  const std::string root = "$";
  SlaRecord r;
  int version = static_cast<int>(number(field(j, "schema_version", root), "$.schema_version"));
  if (version != SlaRecord::kSchemaVersion)
    throw SchemaViolation("$.schema_version", "unsupported version " + std::to_string(version));
  r.student_id = string_of(field(j, "student_id", root), "$.student_id");
  for (auto& [k, v] : prob_map(field(j, "known", root), "$.known"))
    r.known[concept_key(k, "$.known." + k)] = v;
  r.adjustment = prob_map(field(j, "adjustment", root), "$.adjustment");
  r.causal = prob_map(field(j, "causal", root), "$.causal");
  r.psi = prob_map(field(j, "psi", root), "$.psi");
  r.activities = matrix_of(field(j, "activities", root), "$.activities", kActivityCount);
  r.questions = matrix_of(field(j, "questions", root), "$.questions", 3 * kConceptCount);

  const json& prof = field(j, "profile", root);
  if (!prof.is_object()) throw SchemaViolation("$.profile", "expected an object");
  for (auto it = prof.begin(); it != prof.end(); ++it) {
    std::string path = "$.profile." + it.key();
    ConceptId c = concept_key(it.key(), path);
    Severity s{};
    const char* keys[] = {"r", "e", "m"};
    for (int k = 0; k < 3; ++k)
      s[k] = probability(field(it.value(), keys[k], path), path + "." + keys[k]);
    r.profile.entries[c] = s;
  }

  const json& et = field(j, "error_types", root);
  if (!et.is_object()) throw SchemaViolation("$.error_types", "expected an object");
  for (auto it = et.begin(); it != et.end(); ++it) {
    if (!it.value().is_number_integer())
      throw SchemaViolation("$.error_types." + it.key(), "expected an integer");
    r.error_types[it.key()] = it.value().get<int>();
  }

  const json& em = field(j, "emotions", root);
  for (int i = 0; i < kEmotionCount; ++i) {
    std::string name(emotion_name(static_cast<Emotion>(i)));
    const json& v = field(em, name, "$.emotions");
    if (!v.is_number_integer()) throw SchemaViolation("$.emotions." + name, "expected an integer");
    r.emotions[i] = v.get<int>();
  }

  const json& so = field(j, "social", root);
  r.social_sum = number(field(so, "sum", "$.social"), "$.social.sum");
  const json& sc = field(so, "count", "$.social");
  if (!sc.is_number_integer()) throw SchemaViolation("$.social.count", "expected an integer");
  r.social_count = sc.get<int>();

  const json& log = field(j, "log", root);
  if (!log.is_array()) throw SchemaViolation("$.log", "expected an array");
  for (size_t i = 0; i < log.size(); ++i) {
    std::string path = "$.log[" + std::to_string(i) + "]";
    r.log.push_back({string_of(field(log[i], "kind", path), path + ".kind"),
                     string_of(field(log[i], "payload", path), path + ".payload")});
  }
  return r;
}

// ---- store --------------------------------------------------------------------

SlaStore::SlaStore(std::string dir) : dir_(std::move(dir)) {}

std::string SlaStore::path_for(const std::string& student_id) const {
  for (char c : student_id)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.'))
      throw std::invalid_argument("student id '" + student_id + "' has unsupported characters");
  if (student_id.empty() || student_id[0] == '.')
    throw std::invalid_argument("invalid student id '" + student_id + "'");
  return (fs::path(dir_) / (student_id + ".json")).string();
}

void SlaStore::save(const SlaRecord& r) {
  fs::create_directories(dir_);
  std::string path = path_for(r.student_id);
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << to_json_text(r);
    if (!out) throw std::runtime_error("write failed: " + tmp);
  }
  fs::rename(tmp, path);
}

SlaRecord SlaStore::load(const std::string& student_id) const {
  std::string path = path_for(student_id);
  if (!fs::exists(path)) return empty_record(student_id);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  SlaRecord r = from_json_text(ss.str());
  if (r.student_id != student_id)
    throw SchemaViolation("$.student_id", "record belongs to '" + r.student_id + "'");
  return r;
}

std::vector<std::string> SlaStore::students() const {
  std::vector<std::string> out;
  if (!fs::exists(dir_)) return out;
  for (const auto& e : fs::directory_iterator(dir_))
    if (e.is_regular_file() && e.path().extension() == ".json") out.push_back(e.path().stem());
  std::sort(out.begin(), out.end());
  return out;
}

std::mutex& SlaStore::mutex_for(const std::string& id) {
  std::lock_guard<std::mutex> lock(map_mutex_);
  return locks_[id];
}

}  // namespace cdiag
