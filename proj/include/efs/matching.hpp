#pragma once

#include <utility>
#include <vector>

#include "efs/model.hpp"

namespace efs {

// Square matrix of nonnegative integer weights, row-major.
using WeightMatrix = std::vector<std::vector<Value>>;

struct AssignmentResult {
    // assignment[row] = column; a bijection.
    std::vector<int> assignment;
    Value total = 0;
    // Max-weight duals: row_duals[i] + col_duals[j] >= w[i][j], with
    // equality on every assigned edge. Every maximum-weight perfect
    // matching uses only tight edges.
    std::vector<Value> row_duals;
    std::vector<Value> col_duals;
};

// Maximum-weight perfect matching on a complete bipartite graph given by a
// square nonnegative matrix, O(n^3), exact integer arithmetic,
// deterministic for fixed input.
AssignmentResult solve_assignment(const WeightMatrix& w);

std::pair<std::vector<int>, Value> max_weight_perfect_matching(const WeightMatrix& w);

} // namespace efs
