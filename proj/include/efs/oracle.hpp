#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "efs/envy.hpp"
#include "efs/model.hpp"

namespace efs {

// Exponential-time referees for desk-scale verification. Size guards are
// hard errors: a referee that silently samples is not a referee.

// True iff the allocation's own welfare is at least that of every one of
// the n! bundle reassignments. Guard: n <= 8.
bool bf_is_envy_freeable(const Instance& inst, const Allocation& a);

// Pointwise-minimal subsidies by enumerating every simple path in the envy
// graph, independent of the Floyd-Warshall route. Guard: n <= 6.
SubsidyVector bf_min_subsidies(const Instance& inst, const Allocation& a);

struct DichotomyCounterexample {
    GoodSet set;
    int good = -1;
    Value marginal = 0;
};

struct DichotomyReport {
    bool dichotomous = true;
    std::optional<DichotomyCounterexample> counterexample;
};

// Exhaustive check of every (S, g) marginal; returns the first violation
// in mask order. Guard: m <= 20.
DichotomyReport check_dichotomous(const Valuation& v, int m);

// Property-sampled alternative for large m: random (S, g) pairs.
DichotomyReport sample_dichotomous(const Valuation& v, int m, int samples, std::uint64_t seed);

struct Ef1Report {
    bool ef1 = true;
    // First ordered pair (i, j) where i envies j even after removing the
    // best single good from j's bundle.
    std::optional<std::pair<int, int>> witness;
};

// Envy-freeness up to one good, checked for a complete allocation.
Ef1Report check_ef1(const Instance& inst, const Allocation& a);

struct MinTotalSubsidyResult {
    Solution solution;
    Value total = 0;
};

// Enumerates all n^m complete allocations, keeps the envy-freeable ones,
// and returns one minimizing the total of the pointwise-minimal subsidies
// (ties broken by enumeration index, so the result is deterministic).
// Parallelized with OpenMP over the assignment space. Guard: n^m <= 10^6.
MinTotalSubsidyResult bf_min_total_subsidy(const Instance& inst);

// Single-threaded reference for the enumeration above; must return the
// identical solution.
MinTotalSubsidyResult bf_min_total_subsidy_serial(const Instance& inst);

} // namespace efs
