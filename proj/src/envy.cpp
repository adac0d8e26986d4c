#include "efs/envy.hpp"

#include <cassert>
#include <limits>

#include "efs/matching.hpp"

namespace efs {

namespace {

// All-pairs maximum walk weights. With no positive cycle these equal the
// maximum simple-path weights, since dropping any repeated loop cannot
// decrease a walk's weight. Entries are saturated at a large cap so that a
// positive cycle cannot overflow before the diagonal check sees it.
std::vector<std::vector<Value>> longest_paths(const EnvyGraph& g) {
    constexpr Value kCap = std::numeric_limits<Value>::max() / 4;
    auto dist = g.w;
    const int n = g.n;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const Value via = std::min(dist[i][k] + dist[k][j], kCap);
                if (via > dist[i][j]) dist[i][j] = via;
            }
    return dist;
}

} // namespace

EnvyGraph build_envy_graph(const Instance& inst, const Allocation& a) {
    const int n = inst.n;
    if (a.agent_count() != n) throw ContractError("allocation size does not match instance");
    EnvyGraph g;
    g.n = n;
    g.w.assign(n, std::vector<Value>(n, 0));
    for (int i = 0; i < n; ++i) {
        const Value own = inst.valuation(i).value(a.bundle(i));
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            g.w[i][j] = inst.valuation(i).value(a.bundle(j)) - own;
        }
    }
    return g;
}

bool is_envy_freeable(const EnvyGraph& g) {
    // Negated weights; a virtual source with zero-weight edges to every
    // agent is modeled by starting all distances at zero.
    const int n = g.n;
    std::vector<Value> dist(n, 0);
    for (int round = 0; round < n; ++round) {
        bool changed = false;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                if (dist[i] - g.w[i][j] < dist[j]) {
                    dist[j] = dist[i] - g.w[i][j];
                    changed = true;
                }
            }
        if (!changed) return true;
    }
    // A relaxation in round n means a negative cycle in the negated graph,
    // i.e. a positive-weight cycle in the envy graph.
    return false;
}

bool is_envy_freeable_fw(const EnvyGraph& g) {
    // The FW recurrence only ever adds edge weights along walks, so when a
    // positive cycle exists some diagonal entry turns positive; values stay
    // bounded by n * max|w| either way.
    auto dist = longest_paths(g);
    for (int i = 0; i < g.n; ++i)
        if (dist[i][i] > 0) return false;
    return true;
}

Permutation welfare_maximal_reassignment(const Instance& inst, const Allocation& a) {
    const int n = inst.n;
    WeightMatrix w(n, std::vector<Value>(n, 0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) w[i][j] = inst.valuation(i).value(a.bundle(j));
    return solve_assignment(w).assignment;
}

SubsidyVector min_subsidies(const EnvyGraph& g) {
    auto dist = longest_paths(g);
    for (int i = 0; i < g.n; ++i)
        if (dist[i][i] > 0)
            throw ContractError("min_subsidies requires an envy-freeable allocation "
                                "(positive-weight cycle found)");
    SubsidyVector p(g.n, 0);
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) p[i] = std::max(p[i], dist[i][j]);
    return p;
}

bool verify_envy_free(const Instance& inst, const Solution& sol) {
    return !find_envy_violation(inst, sol).has_value();
}

std::optional<std::pair<int, int>> find_envy_violation(const Instance& inst, const Solution& sol) {
    const int n = inst.n;
    if (sol.allocation.agent_count() != n || static_cast<int>(sol.subsidies.size()) != n)
        throw ContractError("solution size does not match instance");
    for (int i = 0; i < n; ++i) {
        const Value own = inst.valuation(i).value(sol.allocation.bundle(i)) + sol.subsidies[i];
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            if (own < inst.valuation(i).value(sol.allocation.bundle(j)) + sol.subsidies[j])
                return std::make_pair(i, j);
        }
    }
    return std::nullopt;
}

Solution reshuffle_solution(const Solution& sol, const Permutation& sigma, const Instance& inst) {
#ifndef NDEBUG
    if (!verify_envy_free(inst, sol))
        throw ContractError("reshuffle_solution requires an envy-free input solution");
    if (!is_envy_freeable(build_envy_graph(inst, apply_permutation(sol.allocation, sigma))))
        throw ContractError("reshuffle_solution requires the reassigned allocation "
                            "to be envy-freeable");
#endif
    return Solution{apply_permutation(sol.allocation, sigma),
                    apply_permutation(sol.subsidies, sigma)};
}

} // namespace efs
