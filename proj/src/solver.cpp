#include "efs/solver.hpp"

#include <algorithm>
#include <numeric>

#include "efs/matching.hpp"
#include "efs/oracle.hpp"

namespace efs {

namespace {

Value checked_marginal(const Instance& inst, int agent, const GoodSet& s, int g) {
    const Value d = inst.valuation(agent).marginal(s, g);
    if (d != 0 && d != 1)
        throw NonDichotomousError(agent, s.to_string(), g,
                                  "marginal of good " + std::to_string(g) + " for agent " +
                                      std::to_string(agent) + " relative to " + s.to_string() +
                                      " is " + std::to_string(d) + ", not in {0,1}");
    return d;
}

WeightMatrix bundle_values(const Instance& inst, const Allocation& a) {
    const int n = inst.n;
    WeightMatrix values(n, std::vector<Value>(n, 0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) values[i][j] = inst.valuation(i).value(a.bundle(j));
    return values;
}

// Iterative Tarjan SCC over the collapsed tight-edge digraph; deterministic
// for fixed input.
std::vector<int> strongly_connected_components(const std::vector<std::vector<int>>& adj) {
    const int n = static_cast<int>(adj.size());
    std::vector<int> comp(n, -1), low(n, 0), num(n, -1), stack_pos;
    std::vector<std::pair<int, int>> call_stack;
    int counter = 0, comps = 0;
    for (int root = 0; root < n; ++root) {
        if (num[root] != -1) continue;
        call_stack.emplace_back(root, 0);
        while (!call_stack.empty()) {
            auto& [v, edge] = call_stack.back();
            if (edge == 0) {
                num[v] = low[v] = counter++;
                stack_pos.push_back(v);
            }
            if (edge < static_cast<int>(adj[v].size())) {
                const int to = adj[v][edge++];
                if (num[to] == -1) {
                    call_stack.emplace_back(to, 0);
                } else if (comp[to] == -1) {
                    low[v] = std::min(low[v], num[to]);
                }
            } else {
                if (low[v] == num[v]) {
                    while (true) {
                        const int w = stack_pos.back();
                        stack_pos.pop_back();
                        comp[w] = comps;
                        if (w == v) break;
                    }
                    ++comps;
                }
                call_stack.pop_back();
                if (!call_stack.empty()) {
                    const int parent = call_stack.back().first;
                    low[parent] = std::min(low[parent], low[v]);
                }
            }
        }
    }
    return comp;
}

} // namespace

std::optional<ExtendWitness> extend(const Instance& inst, const Allocation& a,
                                    const SubsidyVector& p, int g) {
    const int n = inst.n;
    if (a.allocated().contains(g))
        throw ContractError("extend called with an already-allocated good");

    const WeightMatrix values = bundle_values(inst, a);
    Value welfare = 0;
    for (int i = 0; i < n; ++i) welfare += values[i][i];

    const AssignmentResult full = solve_assignment(values);
#ifndef NDEBUG
    if (full.total != welfare)
        throw ContractError("extend requires an envy-freeable input allocation");
#endif
    Permutation inv(n);
    for (int i = 0; i < n; ++i) inv[full.assignment[i]] = i;

    const auto tight = [&](int i, int j) {
        return full.row_duals[i] + full.col_duals[j] == values[i][j];
    };

    // Collapse each (row i, column assignment[i]) pair into node i; an arc
    // i -> i' means row i could equally take i''s column. An edge (k, l)
    // sits in some maximum-weight assignment iff it is tight and k can
    // reach l's current row along tight arcs.
    std::vector<std::vector<int>> adj(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (j != i && tight(i, full.assignment[j])) adj[i].push_back(j);
    const std::vector<int> comp = strongly_connected_components(adj);

    const std::vector<int> candidates = most_subsidized(p);
    for (int k = 0; k < n; ++k) {
        for (int l : candidates) {
            if (checked_marginal(inst, k, a.bundle(l), g) != 1) continue;
            if (!tight(k, l)) continue;
            const int r = inv[l];
            if (r == k) return ExtendWitness{full.assignment, k};
            if (comp[k] != comp[r]) continue;

            // Recover a tight path r -> ... -> k and rotate the assignment
            // along it so that k ends up on column l.
            std::vector<int> prev(n, -1);
            std::vector<int> queue{r};
            prev[r] = r;
            for (std::size_t q = 0; q < queue.size() && prev[k] == -1; ++q)
                for (int to : adj[queue[q]])
                    if (prev[to] == -1) {
                        prev[to] = queue[q];
                        queue.push_back(to);
                    }
            if (prev[k] == -1)
                throw Error("internal: tight component lost the return path");
            Permutation rho = full.assignment;
            for (int v = k; v != r; v = prev[v]) rho[prev[v]] = full.assignment[v];
            rho[k] = full.assignment[r];
            return ExtendWitness{std::move(rho), k};
        }
    }
    return std::nullopt;
}

std::optional<ExtendWitness> extend_reference(const Instance& inst, const Allocation& a,
                                              const SubsidyVector& p, int g) {
    const int n = inst.n;
    if (a.allocated().contains(g))
        throw ContractError("extend called with an already-allocated good");

    const WeightMatrix values = bundle_values(inst, a);
    Value welfare = 0;
    for (int i = 0; i < n; ++i) welfare += values[i][i];

    const std::vector<int> candidates = most_subsidized(p);
    for (int k = 0; k < n; ++k) {
        for (int l : candidates) {
            if (checked_marginal(inst, k, a.bundle(l), g) != 1) continue;

            // Maximum-weight matching between agents != k and bundles != l.
            std::vector<int> rows, cols;
            for (int i = 0; i < n; ++i)
                if (i != k) rows.push_back(i);
            for (int j = 0; j < n; ++j)
                if (j != l) cols.push_back(j);

            Permutation rho(n, -1);
            rho[k] = l;
            Value total = values[k][l];
            if (!rows.empty()) {
                WeightMatrix sub(rows.size(), std::vector<Value>(cols.size(), 0));
                for (std::size_t i = 0; i < rows.size(); ++i)
                    for (std::size_t j = 0; j < cols.size(); ++j)
                        sub[i][j] = values[rows[i]][cols[j]];
                const AssignmentResult res = solve_assignment(sub);
                total += res.total;
                for (std::size_t i = 0; i < rows.size(); ++i)
                    rho[rows[i]] = cols[res.assignment[i]];
            }
            if (total >= welfare) return ExtendWitness{std::move(rho), k};
        }
    }
    return std::nullopt;
}

bool validate_witness(const Instance& inst, const Allocation& a, const SubsidyVector& p,
                      int g, const ExtendWitness& witness) {
    if (!is_permutation(witness.sigma, inst.n)) return false;
    if (witness.kappa < 0 || witness.kappa >= inst.n) return false;
    const Allocation b = apply_permutation(a, witness.sigma);
    if (!is_envy_freeable(build_envy_graph(inst, b))) return false;
    const SubsidyVector q = apply_permutation(p, witness.sigma);
    const auto mq = most_subsidized(q);
    if (std::find(mq.begin(), mq.end(), witness.kappa) == mq.end()) return false;
    return inst.valuation(witness.kappa).marginal(b.bundle(witness.kappa), g) == 1;
}

Solution apply_extend(const Instance& inst, const Allocation& a, const SubsidyVector& p,
                      int g, const ExtendWitness& witness) {
    if (!is_permutation(witness.sigma, inst.n) || witness.kappa < 0 || witness.kappa >= inst.n)
        throw ContractError("malformed extend witness");
#ifndef NDEBUG
    if (!validate_witness(inst, a, p, g, witness))
        throw ContractError("extend witness does not satisfy the extendability conditions");
#endif
    const Allocation b = apply_permutation(a, witness.sigma);
    if (checked_marginal(inst, witness.kappa, b.bundle(witness.kappa), g) != 1)
        throw ContractError("extend witness agent has zero marginal for the good");

    const Allocation next = b.with_good(witness.kappa, g);
    SubsidyVector subsidies = min_subsidies(build_envy_graph(inst, next));
    if (!is_binary(subsidies))
        throw ContractError("extend step left a subsidy outside {0,1}; "
                            "input valuations are not dichotomous");
    return Solution{next, std::move(subsidies)};
}

FindSinkResult find_sink_traced(const Instance& inst, const Allocation& a,
                                const SubsidyVector& p, int g) {
    if (!is_binary(p))
        throw ContractError("find_sink requires subsidies in {0,1}");
    if (a.allocated().contains(g))
        throw ContractError("find_sink called with an already-allocated good");

    const int n = inst.n;
    std::vector<char> tried(n, 0);
    FindSinkResult res;
    int s = most_subsidized(p).front();
    while (true) {
        if (tried[s])
            throw ContractError("find_sink revisited agent " + std::to_string(s) +
                                "; the input solution was extendable");
        tried[s] = 1;
        ++res.trials;

        const Allocation trial = a.with_good(s, g);
        const EnvyGraph graph = build_envy_graph(inst, trial);
        if (!is_envy_freeable(graph))
            throw ContractError("find_sink trial allocation is not envy-freeable; "
                                "the input solution was extendable");
        const SubsidyVector phi = min_subsidies(graph);
        int next = -1;
        for (int j = 0; j < n; ++j)
            if (phi[j] >= 2) {
                next = j;
                break;
            }
        if (next == -1) {
            res.agent = s;
            return res;
        }
        s = next;
    }
}

int find_sink(const Instance& inst, const Allocation& a, const SubsidyVector& p, int g) {
    return find_sink_traced(inst, a, p, g).agent;
}

SolveResult solve(const Instance& inst, const SolveOptions& options) {
    const int n = inst.n;
    const int m = inst.m;

    for (int i = 0; i < n; ++i) {
        const Valuation& v = inst.valuation(i);
        if (v.dichotomy_certified()) continue;
        if (m > 20)
            throw ContractError("agent " + std::to_string(i) +
                                ": uncertified valuation with m > 20; attach a dichotomy "
                                "certificate first");
        const DichotomyReport report = check_dichotomous(v, m);
        if (!report.dichotomous) {
            const auto& c = *report.counterexample;
            throw NonDichotomousError(i, c.set.to_string(), c.good,
                                      "agent " + std::to_string(i) + " is not dichotomous: "
                                          "marginal of good " + std::to_string(c.good) +
                                          " relative to " + c.set.to_string() + " is " +
                                          std::to_string(c.marginal));
        }
        v.attach_dichotomy_certificate();
    }

    std::vector<int> order;
    if (options.order) {
        order = *options.order;
        if (!is_permutation(order, m))
            throw ContractError("good order must be a permutation of 0..m-1");
    } else {
        order.resize(m);
        std::iota(order.begin(), order.end(), 0);
    }

    Allocation allocation(n);
    SubsidyVector subsidies(n, 0);
    SolveResult result;
    result.trace.reserve(m);

    int t = 0;
    for (int g : order) {
        ++t;
        TraceRecord record;
        record.t = t;
        record.good = g;

        if (auto witness = extend(inst, allocation, subsidies, g)) {
            Solution next = apply_extend(inst, allocation, subsidies, g, *witness);
            allocation = std::move(next.allocation);
            subsidies = std::move(next.subsidies);
            record.branch = Branch::Extended;
            record.sigma = witness->sigma;
            record.receiver = witness->kappa;
        } else {
            const FindSinkResult sink = find_sink_traced(inst, allocation, subsidies, g);
            allocation = allocation.with_good(sink.agent, g);
            subsidies = min_subsidies(build_envy_graph(inst, allocation));
            if (!is_binary(subsidies))
                throw ContractError("sink step left a subsidy outside {0,1}; "
                                    "input valuations are not dichotomous");
            record.branch = Branch::Sink;
            record.receiver = sink.agent;
            record.sink_trials = sink.trials;
        }

        if (options.check_invariants &&
            !verify_envy_free(inst, Solution{allocation, subsidies}))
            throw ContractError("intermediate solution lost envy-freeness at iteration " +
                                std::to_string(t));

        record.allocation_after = allocation;
        record.subsidies_after = subsidies;
        record.oracle_calls_cum = inst.total_oracle_calls();
        result.trace.push_back(std::move(record));
    }

    result.solution = Solution{std::move(allocation), std::move(subsidies)};
    return result;
}

} // namespace efs
