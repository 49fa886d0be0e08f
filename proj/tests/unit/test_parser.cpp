#include <doctest.h>

#include "cdiag/concept.hpp"
#include "helpers.hpp"

using namespace cdiag;
using testing::nodes_of;
using testing::parse_ok;

TEST_CASE("a single initialized declaration") {
  Ast a = parse_ok("int main() { int count = 0; return 0; }");
  auto decls = nodes_of(a.root, NodeKind::VarDecl);
  REQUIRE(decls.size() == 1);
  CHECK(decls[0]->text == "count");
  auto lits = nodes_of(*decls[0], NodeKind::IntLit);
  REQUIRE(lits.size() == 1);
  CHECK(lits[0]->int_value == 0);
}

TEST_CASE("the pattern reference has a while loop with nested ifs over the word") {
  const Ast& a = testing::pap().reference;
  bool found = false;
  for (const Node* w : nodes_of(a.root, NodeKind::While)) {
    auto ifs = nodes_of(*w, NodeKind::If);
    if (ifs.size() < 2) continue;
    bool s = false, first = false, second = false;
    for (const Node* n : nodes_of(*w, NodeKind::VarRef)) {
      s = s || n->text == "s";
      first = first || n->text == "first";
      second = second || n->text == "second";
    }
    found = found || (s && first && second && !nodes_of(*w, NodeKind::Index).empty());
  }
  CHECK(found);
}

TEST_CASE("a declaration without a type is a semantic error at that span") {
  ParseResult r = parse("int main() {\n  variable value;\n  return 0;\n}\n");
  REQUIRE_FALSE(r.ok());
  CHECK(r.errors.front().kind == ErrorKind::Semantic);
  CHECK(r.errors.front().message.find("missing type") != std::string::npos);
  CHECK(r.errors.front().span.start_line == 2);
  CHECK(r.errors.front().hint == ConceptId::VariableDeclaration);
}

TEST_CASE("concept mapping") {
  Ast a = parse_ok(
      "int main() { unsigned int value; unsigned int mask; int count; int i;\n"
      "  value = 1; mask = 3; count = 0; i = 0;\n"
      "  while (i < 3) { value = value & mask; if (i == 1) { count++; } i++; }\n"
      "  return 0; }");
  auto whiles = nodes_of(a.root, NodeKind::While);
  REQUIRE(whiles.size() == 1);
  CHECK(concept_of(*whiles[0]) == ConceptId::LoopControl);

  bool masked = false;
  for (const Node* n : nodes_of(a.root, NodeKind::Assign))
    if (n->text == "value" || (!n->children.empty() && n->children[0].text == "value"))
      if (!nodes_of(*n, NodeKind::Binary).empty()) masked = concept_of(*n) == ConceptId::BitwiseMask;
  CHECK(masked);

  auto ifs = nodes_of(a.root, NodeKind::If);
  REQUIRE(ifs.size() == 1);
  auto incs = nodes_of(*ifs[0], NodeKind::IncDec);
  REQUIRE(incs.size() == 1);
  CHECK(concept_of(*incs[0]) == ConceptId::AccumulatorUpdate);
}

TEST_CASE("pretty printing") {
  SUBCASE("empty main has a canonical form") {
    CHECK(pretty_print(parse_ok("int main(){return 0;}")) == "int main() {\n  return 0;\n}\n");
  }
  SUBCASE("round trip keeps the statement count of the pattern reference") {
    const Ast& a = testing::pap().reference;
    Ast b = parse_ok(pretty_print(a));
    CHECK(statement_count(a.root) == statement_count(b.root));
    CHECK(structurally_equal(a.root, b.root));
  }
  SUBCASE("round trip keeps every node kind of the mask reference") {
    const Ast& a = testing::bitmask().reference;
    Ast b = parse_ok(pretty_print(a));
    CHECK(kind_histogram(a.root) == kind_histogram(b.root));
  }
}
