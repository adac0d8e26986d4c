#pragma once

#include <optional>
#include <vector>

#include "efs/envy.hpp"
#include "efs/model.hpp"

namespace efs {

// Witness that an envy-free solution is extendable with a pending good:
// after reassigning bundles by sigma, agent kappa is most subsidized and
// has marginal 1 for the good.
struct ExtendWitness {
    Permutation sigma;
    int kappa = -1;
};

enum class Branch { Extended, Sink };

// One solver iteration, externalizing the inductive invariant: after every
// step the intermediate solution is envy-free with binary subsidies.
struct TraceRecord {
    int t = 0;
    int good = -1;
    Branch branch = Branch::Extended;
    std::optional<Permutation> sigma;
    int receiver = -1;
    Allocation allocation_after;
    SubsidyVector subsidies_after;
    long long oracle_calls_cum = 0;
    int sink_trials = 0;
};

// Searches candidate agents k (ascending) and most-subsidized bundles l
// (ascending) with marginal 1 for g; a candidate succeeds iff reassigning
// k to bundle l preserves welfare maximality. Returns the first witness,
// or nullopt when the solution is not extendable with g.
std::optional<ExtendWitness> extend(const Instance& inst, const Allocation& a,
                                    const SubsidyVector& p, int g);

// Same verdict as extend, computed per candidate with a fresh
// maximum-weight matching on the bundle values without row k / column l.
// Quadratically slower; kept as the reference the fast path is tested
// against.
std::optional<ExtendWitness> extend_reference(const Instance& inst, const Allocation& a,
                                              const SubsidyVector& p, int g);

// True iff the witness satisfies all three extendability conditions for
// (a, p, g). Used by tests and debug builds rather than trusting loop
// order.
bool validate_witness(const Instance& inst, const Allocation& a, const SubsidyVector& p,
                      int g, const ExtendWitness& witness);

// Reassigns bundles by witness.sigma, adds g to agent kappa's bundle, and
// recomputes pointwise-minimal subsidies; the result is envy-free with
// subsidies in {0,1}.
Solution apply_extend(const Instance& inst, const Allocation& a, const SubsidyVector& p,
                      int g, const ExtendWitness& witness);

struct FindSinkResult {
    int agent = -1;
    // Candidate allocations tried, including the successful one.
    int trials = 0;
};

// For a non-extendable envy-free solution with binary subsidies, finds an
// agent whose bundle can absorb g while keeping all subsidies below 2.
// Tries the lowest-index most-subsidized agent first, then the lowest
// agent whose trial subsidy reached 2. Raises ContractError if a candidate
// repeats or a trial allocation is not envy-freeable, both of which can
// only happen when the input was in fact extendable.
FindSinkResult find_sink_traced(const Instance& inst, const Allocation& a,
                                const SubsidyVector& p, int g);

int find_sink(const Instance& inst, const Allocation& a, const SubsidyVector& p, int g);

struct SolveOptions {
    // Order in which goods are assigned; a permutation of 0..m-1.
    // Defaults to ascending index.
    std::optional<std::vector<int>> order;
    // Re-verify envy-freeness of the intermediate solution after every
    // iteration (n^2 extra value queries per step).
    bool check_invariants = false;
};

struct SolveResult {
    Solution solution;
    std::vector<TraceRecord> trace;
};

// The main loop: assigns every good while maintaining an envy-free
// solution with per-agent subsidies in {0,1}. Requires dichotomous
// valuations: uncertified ones are checked exhaustively when m <= 20 and
// rejected otherwise, and every marginal observed during the run is
// asserted to be 0 or 1.
SolveResult solve(const Instance& inst, const SolveOptions& options = {});

} // namespace efs
