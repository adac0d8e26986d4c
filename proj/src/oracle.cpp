#include "efs/oracle.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace efs {

bool bf_is_envy_freeable(const Instance& inst, const Allocation& a) {
    const int n = inst.n;
    if (n > 8)
        throw SizeGuardError("bf_is_envy_freeable supports at most 8 agents, got " +
                             std::to_string(n));
    std::vector<std::vector<Value>> values(n, std::vector<Value>(n, 0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) values[i][j] = inst.valuation(i).value(a.bundle(j));
    Value own = 0;
    for (int i = 0; i < n; ++i) own += values[i][i];

    Permutation sigma = identity_permutation(n);
    do {
        Value reassigned = 0;
        for (int i = 0; i < n; ++i) reassigned += values[i][sigma[i]];
        if (reassigned > own) return false;
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    return true;
}

namespace {

Value longest_simple_path_from(const std::vector<std::vector<Value>>& w, int start) {
    const int n = static_cast<int>(w.size());
    std::vector<char> visited(n, 0);
    visited[start] = 1;
    Value best = 0;
    // DFS over all simple paths; the empty path contributes 0.
    auto dfs = [&](auto&& self, int at, Value acc) -> void {
        best = std::max(best, acc);
        for (int to = 0; to < n; ++to) {
            if (visited[to] || to == at) continue;
            visited[to] = 1;
            self(self, to, acc + w[at][to]);
            visited[to] = 0;
        }
    };
    dfs(dfs, start, 0);
    return best;
}

} // namespace

SubsidyVector bf_min_subsidies(const Instance& inst, const Allocation& a) {
    const int n = inst.n;
    if (n > 6)
        throw SizeGuardError("bf_min_subsidies supports at most 6 agents, got " +
                             std::to_string(n));
    if (!bf_is_envy_freeable(inst, a))
        throw ContractError("bf_min_subsidies requires an envy-freeable allocation");
    const EnvyGraph g = build_envy_graph(inst, a);
    SubsidyVector p(n, 0);
    for (int i = 0; i < n; ++i) p[i] = longest_simple_path_from(g.w, i);
    return p;
}

DichotomyReport check_dichotomous(const Valuation& v, int m) {
    if (m > 20)
        throw SizeGuardError("check_dichotomous supports at most 20 goods, got " +
                             std::to_string(m) + "; use sample_dichotomous instead");
    if (v.good_count() != m)
        throw ContractError("valuation good count does not match m");

    // One value per mask, then all single-good marginals.
    const std::uint64_t size = std::uint64_t{1} << m;
    std::vector<Value> values(size);
    for (std::uint64_t mask = 0; mask < size; ++mask) {
        GoodSet s;
        for (int g = 0; g < m; ++g)
            if (mask & (std::uint64_t{1} << g)) s.insert(g);
        values[mask] = v.value(s);
    }
    for (std::uint64_t mask = 0; mask < size; ++mask)
        for (int g = 0; g < m; ++g) {
            const std::uint64_t bit = std::uint64_t{1} << g;
            if (mask & bit) continue;
            const Value d = values[mask | bit] - values[mask];
            if (d != 0 && d != 1) {
                GoodSet s;
                for (int h = 0; h < m; ++h)
                    if (mask & (std::uint64_t{1} << h)) s.insert(h);
                return DichotomyReport{false, DichotomyCounterexample{std::move(s), g, d}};
            }
        }
    v.attach_dichotomy_certificate();
    return DichotomyReport{};
}

DichotomyReport sample_dichotomous(const Valuation& v, int m, int samples, std::uint64_t seed) {
    if (v.good_count() != m)
        throw ContractError("valuation good count does not match m");
    if (m == 0) return DichotomyReport{};
    std::mt19937_64 rng(seed);
    for (int trial = 0; trial < samples; ++trial) {
        GoodSet s;
        for (int g = 0; g < m; ++g)
            if (rng() & 1) s.insert(g);
        const int g = static_cast<int>(rng() % m);
        if (s.contains(g)) s.erase(g);
        const Value d = v.marginal(s, g);
        if (d != 0 && d != 1)
            return DichotomyReport{false, DichotomyCounterexample{std::move(s), g, d}};
    }
    return DichotomyReport{};
}

Ef1Report check_ef1(const Instance& inst, const Allocation& a) {
    const int n = inst.n;
    for (int i = 0; i < n; ++i) {
        const Value own = inst.valuation(i).value(a.bundle(i));
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const GoodSet& other = a.bundle(j);
            if (own >= inst.valuation(i).value(other)) continue;
            bool fixable = false;
            for (int g : other.to_indices())
                if (own >= inst.valuation(i).value(other.without(g))) {
                    fixable = true;
                    break;
                }
            if (!fixable) return Ef1Report{false, std::make_pair(i, j)};
        }
    }
    return Ef1Report{};
}

namespace {

// Decode assignment index -> bundles (digit d of index, base n, is the
// receiving agent of good d).
void decode_allocation(std::uint64_t index, int n, int m, std::vector<GoodSet>& bundles) {
    bundles.resize(n);
    for (auto& b : bundles) b.clear();
    for (int g = 0; g < m; ++g) {
        bundles[index % n].insert(g);
        index /= n;
    }
}

struct Candidate {
    Value total = -1;
    std::uint64_t index = 0;
    bool valid = false;

    bool better_than(const Candidate& other) const {
        if (!other.valid) return valid;
        if (!valid) return false;
        if (total != other.total) return total < other.total;
        return index < other.index;
    }
};

// Buffers reused across the enumeration so the inner loop does not churn
// the allocator.
struct EnumScratch {
    std::vector<GoodSet> bundles;
    EnvyGraph graph;
};

Candidate evaluate_allocation(const Instance& inst, std::uint64_t index, EnumScratch& scratch) {
    const int n = inst.n;
    decode_allocation(index, n, inst.m, scratch.bundles);

    EnvyGraph& g = scratch.graph;
    g.n = n;
    g.w.resize(n);
    for (int i = 0; i < n; ++i) {
        g.w[i].resize(n);
        const Value own = inst.valuation(i).value(scratch.bundles[i]);
        for (int j = 0; j < n; ++j)
            g.w[i][j] = j == i ? 0 : inst.valuation(i).value(scratch.bundles[j]) - own;
    }
    if (!is_envy_freeable(g)) return Candidate{};
    return Candidate{total_subsidy(min_subsidies(g)), index, true};
}

std::uint64_t guarded_space_size(const Instance& inst) {
    constexpr std::uint64_t kLimit = 1000000;
    std::uint64_t space = 1;
    for (int g = 0; g < inst.m; ++g) {
        if (space > kLimit / static_cast<std::uint64_t>(inst.n))
            throw SizeGuardError("bf_min_total_subsidy limited to n^m <= 10^6 allocations");
        space *= static_cast<std::uint64_t>(inst.n);
    }
    if (space > kLimit)
        throw SizeGuardError("bf_min_total_subsidy limited to n^m <= 10^6 allocations");
    return space;
}

MinTotalSubsidyResult finish(const Instance& inst, const Candidate& best) {
    if (!best.valid)
        throw Error("internal: no envy-freeable complete allocation found");
    std::vector<GoodSet> bundles;
    decode_allocation(best.index, inst.n, inst.m, bundles);
    const Allocation a(std::move(bundles));
    SubsidyVector p = min_subsidies(build_envy_graph(inst, a));
    return MinTotalSubsidyResult{Solution{a, std::move(p)}, best.total};
}

} // namespace

MinTotalSubsidyResult bf_min_total_subsidy(const Instance& inst) {
    const std::uint64_t space = guarded_space_size(inst);
    Candidate best;
#ifdef _OPENMP
#pragma omp parallel
    {
        Candidate local;
        EnumScratch scratch;
#pragma omp for schedule(static)
        for (std::int64_t index = 0; index < static_cast<std::int64_t>(space); ++index) {
            const Candidate c =
                evaluate_allocation(inst, static_cast<std::uint64_t>(index), scratch);
            if (c.better_than(local)) local = c;
        }
#pragma omp critical
        {
            if (local.better_than(best)) best = local;
        }
    }
#else
    EnumScratch scratch;
    for (std::uint64_t index = 0; index < space; ++index) {
        const Candidate c = evaluate_allocation(inst, index, scratch);
        if (c.better_than(best)) best = c;
    }
#endif
    return finish(inst, best);
}

MinTotalSubsidyResult bf_min_total_subsidy_serial(const Instance& inst) {
    const std::uint64_t space = guarded_space_size(inst);
    Candidate best;
    EnumScratch scratch;
    for (std::uint64_t index = 0; index < space; ++index) {
        const Candidate c = evaluate_allocation(inst, index, scratch);
        if (c.better_than(best)) best = c;
    }
    return finish(inst, best);
}

} // namespace efs
