#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cproc {

// Minimum-cost perfect matching on a dense n x n cost matrix (row-major),
// Hungarian method with potentials, O(n^3). Returns the column assigned to
// each row.
std::vector<std::size_t> solve_assignment(std::span<const double> cost, std::size_t n);

}  // namespace cproc
