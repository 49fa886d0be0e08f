// Exercise fixtures: reference program, concept inventory, tests, dialog parameters.
#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cdiag/concept.hpp"
#include "cdiag/interpreter.hpp"

namespace cdiag {

struct FixtureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Prompt templates per question link kind; `{concept}` and `{target}` are substituted.
struct QuestionGraphParams {
  int probes_per_question = 6;
  std::string synonym = "Solve the same problem for other inputs ({concept})";
  std::string homonym = "Apply {concept} to a related situation";
  std::string abstraction = "Generalize {concept} into a parameterized form";
};

struct Exercise {
  std::string id;
  std::string title;
  std::string dir;
  std::string reference_source;
  Ast reference;
  std::vector<ConceptId> concepts;        // inventory taught by the exercise
  std::vector<std::string> prerequisites; // background topics
  std::vector<TestCase> tests;
  QuestionGraphParams graph;
  std::map<std::string, std::vector<std::string>> causal_blocks;  // variable -> blocks
  std::string survey_path;                // questionnaire schema, may be empty
};

nlohmann::json tests_to_json(const std::vector<TestCase>& tests);
/// Throws FixtureError naming the offending entry.
std::vector<TestCase> tests_from_json(const nlohmann::json& j);

/// Load `<dir>/exercise.json`; verifies the reference parses and reproduces
/// every expected output of its tests.
Exercise load_exercise(const std::string& dir);

/// Directory of the fixtures shipped with the sources.
std::string shipped_fixtures_dir();

std::string read_file(const std::string& path);

}  // namespace cdiag
