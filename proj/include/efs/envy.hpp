#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "efs/model.hpp"

namespace efs {

// Complete weighted directed graph on the agents;
// w[i][j] = v_i(A_j) - v_i(A_i), zero diagonal.
struct EnvyGraph {
    int n = 0;
    std::vector<std::vector<Value>> w;
};

struct Solution {
    Allocation allocation;
    SubsidyVector subsidies;
};

EnvyGraph build_envy_graph(const Instance& inst, const Allocation& a);

// True iff the graph has no directed cycle of strictly positive total
// weight. Bellman-Ford from a virtual source on the negated weights.
bool is_envy_freeable(const EnvyGraph& g);

// Same predicate via the Floyd-Warshall diagonal; kept as an independent
// route and cross-checked against is_envy_freeable in tests.
bool is_envy_freeable_fw(const EnvyGraph& g);

// Permutation sigma maximizing sum_i v_i(A_sigma(i)); the reassigned
// allocation is always envy-freeable.
Permutation welfare_maximal_reassignment(const Instance& inst, const Allocation& a);

// Pointwise-minimal subsidies for an envy-freeable allocation: p_i is the
// maximum weight of any path starting at i, the empty path included.
// Throws ContractError if the graph has a positive cycle.
SubsidyVector min_subsidies(const EnvyGraph& g);

// Direct definition check, independent of the envy-graph machinery.
bool verify_envy_free(const Instance& inst, const Solution& sol);

// First ordered pair (i, j) with v_i(A_i) + p_i < v_i(A_j) + p_j, if any.
std::optional<std::pair<int, int>> find_envy_violation(const Instance& inst, const Solution& sol);

// (A_sigma, p_sigma). Requires sol envy-free and the reassigned allocation
// envy-freeable; both are checked in debug builds.
Solution reshuffle_solution(const Solution& sol, const Permutation& sigma, const Instance& inst);

} // namespace efs
