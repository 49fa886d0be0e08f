// Exact minimum-cost bipartite assignment.
#pragma once

#include <vector>

namespace cdiag {

/// Hungarian algorithm on a rectangular cost matrix (rows x cols, rows may
/// differ from cols). Returns, for each row, its assigned column or -1 when
/// there are more rows than columns. Minimizes the summed cost.
std::vector<int> solve_assignment(const std::vector<std::vector<double>>& cost);

}  // namespace cdiag
