#include <doctest.h>

#include <set>

#include "cdiag/stub.hpp"
#include "cdiag/testgen.hpp"
#include "helpers.hpp"

using namespace cdiag;

TEST_CASE("overlapping occurrences are counted") {
  ExecutionTrace t = execute(testing::pap().reference, testing::word_file("papap"));
  CHECK(t.outcome == Outcome::Completed);
  CHECK(t.stdout_text == "2 1\n");
}

TEST_CASE("an endless loop hits the step limit") {
  ExecOptions opt;
  opt.step_limit = 1000;
  ExecutionTrace t = execute(testing::parse_ok("int main() { while (1); return 0; }"), {}, opt);
  CHECK(t.outcome == Outcome::StepLimitExceeded);
}

TEST_CASE("bit field replacement") {
  ExecutionTrace t = execute(testing::bitmask().reference, testing::mask_input("ff", "0", 1, 2));
  unsigned v = 0xFF, w = 0, mask = (1u << 2) - 1;
  unsigned expect = (v & ~(mask << 1)) | ((w & mask) << 1);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%x\n", expect);
  CHECK(t.stdout_text == buf);
}

TEST_CASE("stubs") {
  const Ast& a = testing::pap().reference;
  ExecutionTrace seed = execute(a, testing::word_file("papap"));

  SUBCASE("the whole main behaves like the program") {
    const Node* main_fn = find_function(a, "main");
    REQUIRE(main_fn);
    Stub s = make_stub(a, main_fn->children.back().span, seed);
    CHECK(execute_stub(s, testing::word_file("pap pa")).stdout_text ==
          execute(a, testing::word_file("pap pa")).stdout_text);
  }
  SUBCASE("a span cutting an expression is rejected") {
    const Node* w = testing::nodes_of(a.root, NodeKind::While).front();
    SourceSpan cut = w->span;
    cut.end_line = cut.start_line;
    cut.end_col = cut.start_col + 3;
    CHECK_THROWS_AS(make_stub(a, cut, seed), FragmentNotExtractable);
  }
}

TEST_CASE("test generation") {
  const Ast& a = testing::pap().reference;
  CHECK(generate_tests(a, 1, 3).size() == 1);

  auto t1 = generate_tests(a, 40, 9), t2 = generate_tests(a, 40, 9);
  REQUIRE(t1.size() == t2.size());
  for (size_t i = 0; i < t1.size(); ++i) {
    CHECK(t1[i].stdin_tokens == t2[i].stdin_tokens);
    CHECK(t1[i].input_files == t2[i].input_files);
  }

  bool at_first = false, at_last = false, in_middle = false;
  for (const auto& t : t1) {
    for (const auto& [name, text] : t.input_files) {
      size_t start = 0;
      while (start <= text.size()) {
        size_t end = text.find_first_of(" \t\n", start);
        if (end == std::string::npos) end = text.size();
        std::string w = text.substr(start, end - start);
        if (w.size() >= 3) {
          at_first = at_first || w.front() == 'p';
          at_last = at_last || w.back() == 'p';
          in_middle = in_middle || w.substr(1, w.size() - 2).find('p') != std::string::npos;
        }
        start = end + 1;
      }
    }
  }
  CHECK(at_first);
  CHECK(in_middle);
  CHECK(at_last);
}
