#pragma once

#include <random>
#include <tuple>
#include <vector>

#include "efs/envy.hpp"
#include "efs/io.hpp"
#include "efs/model.hpp"
#include "efs/solver.hpp"

namespace efs::test {

// Three agents, five goods; the canonical worked example used across the
// suites. Agent 0 wants one of {0,3}; agent 1 wants 0 and 2 individually
// plus one of {1,3,4}; agent 2 wants 0 plus one of {2,3,4}.
inline Instance five_good_fixture() {
    std::vector<Valuation> vals;
    vals.push_back(Valuation::capped_groups(5, {{GoodSet{0, 3}, 1}}));
    vals.push_back(Valuation::capped_groups(
        5, {{GoodSet{0}, 1}, {GoodSet{2}, 1}, {GoodSet{1, 3, 4}, 1}}));
    vals.push_back(Valuation::capped_groups(5, {{GoodSet{0}, 1}, {GoodSet{2, 3, 4}, 1}}));
    return Instance(3, 5, std::move(vals));
}

// The six partial/complete allocations of the worked example, paired with
// their known pointwise-minimal subsidies.
inline std::vector<std::pair<Allocation, SubsidyVector>> five_good_fixture_steps() {
    return {
        {Allocation({GoodSet{0}, GoodSet{}, GoodSet{}}), {0, 1, 1}},
        {Allocation({GoodSet{0}, GoodSet{1}, GoodSet{}}), {0, 0, 1}},
        {Allocation({GoodSet{0}, GoodSet{1}, GoodSet{2}}), {0, 0, 0}},
        {Allocation({GoodSet{0, 3}, GoodSet{1}, GoodSet{2}}), {0, 1, 1}},
        {Allocation({GoodSet{1}, GoodSet{2}, GoodSet{0, 3}}), {1, 1, 0}},
        {Allocation({GoodSet{1}, GoodSet{2, 4}, GoodSet{0, 3}}), {1, 0, 0}},
    };
}

// n agents, one good that everyone values at 1; the tight case for the
// n-1 total subsidy bound.
inline Instance one_good_all_ones(int n) {
    std::vector<Valuation> vals;
    for (int i = 0; i < n; ++i) vals.push_back(Valuation::additive(1, GoodSet{0}));
    return Instance(n, 1, std::move(vals));
}

inline Instance random_instance(std::uint64_t seed, int n, int m, double table_weight = 0.0) {
    GeneratorConfig config;
    config.n = n;
    config.m = m;
    config.seed = seed;
    config.table_weight = table_weight;
    return std::move(generate(config).instance);
}

// Each good goes to a uniform agent or stays unallocated.
inline Allocation random_partial_allocation(std::mt19937_64& rng, int n, int m) {
    std::vector<GoodSet> bundles(n);
    for (int g = 0; g < m; ++g) {
        const int slot = static_cast<int>(rng() % static_cast<std::uint64_t>(n + 1));
        if (slot < n) bundles[slot].insert(g);
    }
    return Allocation(std::move(bundles));
}

inline Allocation make_envy_freeable(const Instance& inst, const Allocation& a) {
    return apply_permutation(a, welfare_maximal_reassignment(inst, a));
}

// Exhaustive extendability test: some bundle reassignment keeps the
// welfare maximal and gives a most-subsidized agent marginal 1 for g.
inline bool bf_extendable(const Instance& inst, const Allocation& a, const SubsidyVector& p,
                          int g) {
    const int n = inst.n;
    std::vector<std::vector<Value>> values(n, std::vector<Value>(n, 0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) values[i][j] = inst.valuation(i).value(a.bundle(j));

    Permutation sigma = identity_permutation(n);
    Value best = 0;
    do {
        Value welfare = 0;
        for (int i = 0; i < n; ++i) welfare += values[i][sigma[i]];
        best = std::max(best, welfare);
    } while (std::next_permutation(sigma.begin(), sigma.end()));

    sigma = identity_permutation(n);
    do {
        Value welfare = 0;
        for (int i = 0; i < n; ++i) welfare += values[i][sigma[i]];
        if (welfare != best) continue;
        const SubsidyVector q = apply_permutation(p, sigma);
        for (int kappa : most_subsidized(q))
            if (inst.valuation(kappa).marginal(a.bundle(sigma[kappa]), g) == 1) return true;
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    return false;
}

struct SolverState {
    Allocation allocation;
    SubsidyVector subsidies;
    int good;
};

// All (solution-so-far, pending good) states a solve run passes through.
inline std::vector<SolverState> collect_solver_states(const Instance& inst) {
    const SolveResult result = solve(inst);
    std::vector<SolverState> states;
    Allocation allocation(inst.n);
    SubsidyVector subsidies(inst.n, 0);
    for (const auto& rec : result.trace) {
        states.push_back({allocation, subsidies, rec.good});
        allocation = rec.allocation_after;
        subsidies = rec.subsidies_after;
    }
    return states;
}

} // namespace efs::test
