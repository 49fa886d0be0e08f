#include <doctest.h>

#include <optional>

#include "cdiag/mutate.hpp"
#include "helpers.hpp"

using namespace cdiag;

namespace {

Mutant first_site(const Exercise& ex, const std::string& op) {
  auto sites = mutation_sites(ex.reference, op);
  REQUIRE_FALSE(sites.empty());
  return apply_mutation(ex.reference, sites.front());
}

}  // namespace

TEST_CASE("dropping a type gives an untyped declaration") {
  Mutant m = first_site(testing::bitmask(), "drop-type");
  CHECK_FALSE(m.parses);
  CHECK(m.source.find("variable value;") != std::string::npos);
}

TEST_CASE("narrowed separators drop the tab") {
  const Exercise& ex = testing::pap();
  std::optional<Mutant> tab;
  for (const auto& site : mutation_sites(ex.reference, "narrow-separators"))
    if (site.description.find("'\\t'") != std::string::npos) tab = apply_mutation(ex.reference, site);
  REQUIRE(tab);
  const Mutant& m = *tab;
  REQUIRE(m.parses);
  CHECK(m.source.find("'\\t'") == std::string::npos);
  Ast a = testing::parse_ok(m.source);
  CHECK(execute(a, testing::word_file("pap\tpap")).stdout_text !=
        execute(testing::pap().reference, testing::word_file("pap\tpap")).stdout_text);
}

TEST_CASE("no overlap reset counts papap once") {
  Mutant m = first_site(testing::pap(), "no-overlap-reset");
  REQUIRE(m.parses);
  CHECK(execute(testing::parse_ok(m.source), testing::word_file("papap")).stdout_text == "1 1\n");
}
