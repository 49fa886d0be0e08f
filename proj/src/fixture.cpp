#include "cdiag/fixture.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cdiag/parser.hpp"

namespace cdiag {

namespace fs = std::filesystem;
using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FixtureError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string shipped_fixtures_dir() {
#ifdef CDIAG_SOURCE_DIR
  return std::string(CDIAG_SOURCE_DIR) + "/fixtures";
#else
  return "fixtures";
#endif
}

json tests_to_json(const std::vector<TestCase>& tests) {
  json arr = json::array();
  for (const auto& t : tests) {
    json e;
    e["id"] = t.id;
    e["stdin"] = t.stdin_tokens;
    e["files"] = t.input_files;
    if (t.expected_stdout) e["expected_stdout"] = *t.expected_stdout;
    arr.push_back(std::move(e));
  }
  return json{{"schema_version", 1}, {"tests", arr}};
}

std::vector<TestCase> tests_from_json(const json& j) {
  if (!j.is_object() || !j.contains("tests") || !j["tests"].is_array())
    throw FixtureError("tests: expected an object with a 'tests' array");
  std::vector<TestCase> out;
  for (size_t i = 0; i < j["tests"].size(); ++i) {
    const json& e = j["tests"][i];
    std::string where = "tests[" + std::to_string(i) + "]";
    try {
      TestCase t;
      t.id = e.at("id").get<std::string>();
      if (e.contains("stdin")) t.stdin_tokens = e["stdin"].get<std::vector<std::string>>();
      if (e.contains("files")) t.input_files = e["files"].get<std::map<std::string, std::string>>();
      if (e.contains("expected_stdout")) t.expected_stdout = e["expected_stdout"].get<std::string>();
      out.push_back(std::move(t));
    } catch (const json::exception& ex) {
      throw FixtureError(where + ": " + ex.what());
    }
  }
  return out;
}

Exercise load_exercise(const std::string& dir) {
  Exercise ex;
  ex.dir = dir;
  std::string path = (fs::path(dir) / "exercise.json").string();
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw FixtureError(path + ": " + e.what());
  }
  auto need = [&](const char* key) -> const json& {
    if (!j.contains(key)) throw FixtureError(path + ": missing '" + std::string(key) + "'");
    return j[key];
  };
  try {
    ex.id = need("id").get<std::string>();
    ex.title = j.value("title", ex.id);
    ex.reference_source = read_file((fs::path(dir) / need("reference").get<std::string>()).string());
    for (const auto& c : need("concepts")) {
      auto id = concept_from_name(c.get<std::string>());
      if (!id) throw FixtureError(path + ": unknown concept '" + c.get<std::string>() + "'");
      ex.concepts.push_back(*id);
    }
    if (j.contains("prerequisites"))
      ex.prerequisites = j["prerequisites"].get<std::vector<std::string>>();
    if (j.contains("question_graph")) {
      const json& g = j["question_graph"];
      ex.graph.probes_per_question = g.value("probes_per_question", ex.graph.probes_per_question);
      ex.graph.synonym = g.value("synonym", ex.graph.synonym);
      ex.graph.homonym = g.value("homonym", ex.graph.homonym);
      ex.graph.abstraction = g.value("abstraction", ex.graph.abstraction);
    }
    if (j.contains("causal_blocks"))
      ex.causal_blocks = j["causal_blocks"].get<std::map<std::string, std::vector<std::string>>>();
    if (j.contains("survey"))
      ex.survey_path = (fs::path(dir) / j["survey"].get<std::string>()).lexically_normal().string();
    std::string tests_path = (fs::path(dir) / need("tests").get<std::string>()).string();
    json tj;
    try {
      tj = json::parse(read_file(tests_path));
    } catch (const json::parse_error& e) {
      throw FixtureError(tests_path + ": " + e.what());
    }
    ex.tests = tests_from_json(tj);
  } catch (const json::exception& e) {
    throw FixtureError(path + ": " + e.what());
  }

  ParseResult pr = parse(ex.reference_source);
  if (!pr.ok())
    throw FixtureError(dir + ": reference does not parse: " + pr.errors.front().message);
  ex.reference = std::move(pr.ast);
  ExecOptions opt;
  opt.record_steps = false;
  for (const auto& t : ex.tests) {
    if (!t.expected_stdout) continue;
    ExecutionTrace tr = execute(ex.reference, t, opt);
    if (tr.stdout_text != *t.expected_stdout)
      throw FixtureError(dir + ": reference fails its own test '" + t.id + "'");
  }
  return ex;
}

}  // namespace cdiag
