#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cdiag/fixture.hpp"
#include "cdiag/interpreter.hpp"
#include "cdiag/parser.hpp"

namespace testing {

inline cdiag::Ast parse_ok(const std::string& src) {
  cdiag::ParseResult r = cdiag::parse(src);
  if (!r.ok()) throw std::runtime_error("does not parse: " + r.errors.front().message);
  return r.ast;
}

inline void walk(const cdiag::Node& n, const std::function<void(const cdiag::Node&)>& f) {
  f(n);
  for (const auto& c : n.children) walk(c, f);
}

inline std::vector<const cdiag::Node*> nodes_of(const cdiag::Node& root, cdiag::NodeKind k) {
  std::vector<const cdiag::Node*> out;
  walk(root, [&](const cdiag::Node& n) {
    if (n.kind == k) out.push_back(&n);
  });
  return out;
}

inline const cdiag::Exercise& pap() {
  static const cdiag::Exercise ex = cdiag::load_exercise(cdiag::shipped_fixtures_dir() + "/pap_counter");
  return ex;
}

inline const cdiag::Exercise& bitmask() {
  static const cdiag::Exercise ex = cdiag::load_exercise(cdiag::shipped_fixtures_dir() + "/bitmask");
  return ex;
}

inline cdiag::TestCase word_file(const std::string& text) {
  cdiag::TestCase t;
  t.id = "w";
  t.input_files["input.txt"] = text;
  return t;
}

inline cdiag::TestCase mask_input(const std::string& value, const std::string& second, int p, int n) {
  cdiag::TestCase t;
  t.id = "m";
  t.stdin_tokens = {value, second, std::to_string(p), std::to_string(n)};
  return t;
}

}  // namespace testing
