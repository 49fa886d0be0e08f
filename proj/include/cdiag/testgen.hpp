// Seeded test-input generation from the constants a program compares against.
#pragma once

#include <cstdint>
#include <vector>

#include "cdiag/interpreter.hpp"

namespace cdiag {

/// Up to `budget` tests (exactly `budget` when budget >= 1): boundary cases
/// first (each comparison constant c as c-1, c, c+1; characters compared
/// against array elements at the first, middle and last word position;
/// bit-field position/length pairs at the beginning, middle and end of the
/// word), then seeded random fill.
std::vector<TestCase> generate_tests(const Ast& ast, int budget, std::uint64_t seed);

}  // namespace cdiag
