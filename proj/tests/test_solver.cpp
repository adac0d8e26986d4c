#include <random>

#include "doctest.h"

#include "efs/oracle.hpp"
#include "efs/solver.hpp"
#include "helpers.hpp"

using namespace efs;

namespace {

const Allocation kStep3({GoodSet{0}, GoodSet{1}, GoodSet{}});
const Allocation kStep4({GoodSet{0}, GoodSet{1}, GoodSet{2}});
const Allocation kStep5({GoodSet{0, 3}, GoodSet{1}, GoodSet{2}});

} // namespace

TEST_CASE("extend finds a witness on the empty allocation") {
    const Instance inst = test::five_good_fixture();
    const auto witness = extend(inst, Allocation(3), {0, 0, 0}, 0);
    REQUIRE(witness.has_value());
    CHECK(witness->kappa == 0);
    CHECK(validate_witness(inst, Allocation(3), {0, 0, 0}, 0, *witness));
}

TEST_CASE("extend reports the blocked state as non-extendable") {
    const Instance inst = test::five_good_fixture();
    CHECK_FALSE(extend(inst, kStep4, {0, 0, 0}, 3).has_value());
    CHECK_FALSE(extend_reference(inst, kStep4, {0, 0, 0}, 3).has_value());
}

TEST_CASE("extend finds a reassignment witness after the sink step") {
    const Instance inst = test::five_good_fixture();
    const auto witness = extend(inst, kStep5, {0, 1, 1}, 4);
    REQUIRE(witness.has_value());
    CHECK(validate_witness(inst, kStep5, {0, 1, 1}, 4, *witness));

    const auto reference = extend_reference(inst, kStep5, {0, 1, 1}, 4);
    REQUIRE(reference.has_value());
    CHECK(validate_witness(inst, kStep5, {0, 1, 1}, 4, *reference));
}

TEST_CASE("extend rejects an already-allocated good") {
    const Instance inst = test::five_good_fixture();
    CHECK_THROWS_AS((void)extend(inst, kStep4, {0, 0, 0}, 1), ContractError);
}

TEST_CASE("apply_extend reproduces the fixture steps") {
    const Instance inst = test::five_good_fixture();

    const Solution first =
        apply_extend(inst, Allocation(3), {0, 0, 0}, 0, {identity_permutation(3), 0});
    CHECK(first.allocation == Allocation({GoodSet{0}, GoodSet{}, GoodSet{}}));
    CHECK(first.subsidies == SubsidyVector{0, 1, 1});

    const Solution third = apply_extend(inst, kStep3, {0, 0, 1}, 2, {identity_permutation(3), 2});
    CHECK(third.allocation == kStep4);
    CHECK(third.subsidies == SubsidyVector{0, 0, 0});
}

TEST_CASE("apply_extend on a single agent") {
    std::vector<Valuation> vals;
    vals.push_back(Valuation::additive(2, GoodSet{0, 1}));
    const Instance solo(1, 2, std::move(vals));
    const Solution sol = apply_extend(solo, Allocation(1), {0}, 1, {{0}, 0});
    CHECK(sol.allocation.bundle(0) == GoodSet{1});
    CHECK(sol.subsidies == SubsidyVector{0});
}

TEST_CASE("apply_extend rejects malformed witnesses") {
    const Instance inst = test::five_good_fixture();
    CHECK_THROWS_AS(apply_extend(inst, Allocation(3), {0, 0, 0}, 0, {{0, 0, 1}, 0}),
                    ContractError);
    CHECK_THROWS_AS(apply_extend(inst, Allocation(3), {0, 0, 0}, 0, {identity_permutation(3), 7}),
                    ContractError);
}

TEST_CASE("find_sink on the blocked fixture state") {
    const Instance inst = test::five_good_fixture();
    const FindSinkResult res = find_sink_traced(inst, kStep4, {0, 0, 0}, 3);
    CHECK(res.agent == 0);
    CHECK(res.trials == 1);
    CHECK(find_sink(inst, kStep4, {0, 0, 0}, 3) == 0);
}

TEST_CASE("find_sink places a worthless good immediately") {
    std::vector<Valuation> vals;
    vals.push_back(Valuation::additive(1, GoodSet{}));
    vals.push_back(Valuation::additive(1, GoodSet{}));
    const Instance inst(2, 1, std::move(vals));
    const FindSinkResult res = find_sink_traced(inst, Allocation(2), {0, 0}, 0);
    CHECK(res.agent == 0);
    CHECK(res.trials == 1);
}

TEST_CASE("find_sink validates its inputs") {
    const Instance inst = test::five_good_fixture();
    CHECK_THROWS_AS((void)find_sink(inst, kStep4, {0, 0, 2}, 3), ContractError);
    CHECK_THROWS_AS((void)find_sink(inst, kStep4, {0, 0, 0}, 1), ContractError);
}

TEST_CASE("extend agrees with exhaustive search on solver states") {
    std::mt19937_64 rng(307);
    int states_checked = 0;
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 3);
        const int m = 2 + static_cast<int>(rng() % 4);
        const Instance inst = test::random_instance(6000 + trial, n, m);
        for (const auto& state : test::collect_solver_states(inst)) {
            const bool expected = test::bf_extendable(inst, state.allocation, state.subsidies,
                                                      state.good);
            const auto fast = extend(inst, state.allocation, state.subsidies, state.good);
            const auto reference =
                extend_reference(inst, state.allocation, state.subsidies, state.good);
            CHECK(fast.has_value() == expected);
            CHECK(reference.has_value() == expected);
            if (fast)
                CHECK(validate_witness(inst, state.allocation, state.subsidies, state.good,
                                       *fast));
            if (reference)
                CHECK(validate_witness(inst, state.allocation, state.subsidies, state.good,
                                       *reference));
            ++states_checked;
        }
    }
    CHECK(states_checked >= 100);
}

TEST_CASE("extend routes agree on larger random envy-freeable states") {
    // Exercises the tight-edge route well past the exhaustive-search sizes;
    // the reference route is the per-candidate matching formulation.
    std::mt19937_64 rng(331);
    int witnesses = 0;
    for (int trial = 0; trial < 150; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 7);
        const int m = 3 + static_cast<int>(rng() % 8);
        const Instance inst = test::random_instance(10000 + trial, n, m);
        const Allocation a =
            test::make_envy_freeable(inst, test::random_partial_allocation(rng, n, m));
        const GoodSet free_goods = GoodSet::full(m).minus(a.allocated());
        if (free_goods.empty()) continue;
        const auto goods = free_goods.to_indices();
        const int g = goods[rng() % goods.size()];
        const SubsidyVector p = min_subsidies(build_envy_graph(inst, a));

        const auto fast = extend(inst, a, p, g);
        const auto reference = extend_reference(inst, a, p, g);
        REQUIRE(fast.has_value() == reference.has_value());
        if (fast) {
            CHECK(validate_witness(inst, a, p, g, *fast));
            CHECK(validate_witness(inst, a, p, g, *reference));
            ++witnesses;
        }
    }
    CHECK(witnesses > 30);
}

TEST_CASE("find_sink detects a violated non-extendability precondition") {
    // Agent 1 values the pending good and is most subsidized, so the state
    // is extendable; the first sink trial parks the good on agent 0 and
    // creates a positive-weight cycle.
    std::vector<Valuation> vals;
    vals.push_back(Valuation::additive(2, GoodSet{}));
    vals.push_back(Valuation::additive(2, GoodSet{1}));
    const Instance inst(2, 2, std::move(vals));
    REQUIRE(test::bf_extendable(inst, Allocation(2), {0, 0}, 1));
    CHECK_THROWS_AS((void)find_sink(inst, Allocation(2), {0, 0}, 1), ContractError);
}

TEST_CASE("find_sink keeps subsidies binary on non-extendable states") {
    std::mt19937_64 rng(311);
    int sinks = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 3);
        const int m = 2 + static_cast<int>(rng() % 4);
        const Instance inst = test::random_instance(7000 + trial, n, m);
        for (const auto& state : test::collect_solver_states(inst)) {
            if (test::bf_extendable(inst, state.allocation, state.subsidies, state.good))
                continue;
            const FindSinkResult res =
                find_sink_traced(inst, state.allocation, state.subsidies, state.good);
            CHECK(res.trials <= n);
            const Allocation next = state.allocation.with_good(res.agent, state.good);
            CHECK(is_binary(min_subsidies(build_envy_graph(inst, next))));
            ++sinks;
        }
    }
    CHECK(sinks > 20);
}

TEST_CASE("solve on the empty-goods instance") {
    std::vector<Valuation> vals;
    vals.push_back(Valuation::additive(0, GoodSet{}));
    vals.push_back(Valuation::additive(0, GoodSet{}));
    const Instance inst(2, 0, std::move(vals));
    const SolveResult result = solve(inst);
    CHECK(result.trace.empty());
    CHECK(result.solution.allocation == Allocation(2));
    CHECK(result.solution.subsidies == SubsidyVector{0, 0});
}

TEST_CASE("solve on the one-good tight case") {
    for (int n = 2; n <= 6; ++n) {
        const Instance inst = test::one_good_all_ones(n);
        const SolveResult result = solve(inst);
        CHECK(total_subsidy(result.solution.subsidies) == n - 1);
        CHECK(verify_envy_free(inst, result.solution));
    }
}

TEST_CASE("solve on the five-good fixture meets every guarantee") {
    const Instance inst = test::five_good_fixture();
    const SolveResult result = solve(inst, {.order = std::nullopt, .check_invariants = true});
    CHECK(result.solution.allocation.is_complete(5));
    CHECK(is_binary(result.solution.subsidies));
    CHECK(verify_envy_free(inst, result.solution));
    CHECK(total_subsidy(result.solution.subsidies) <= 2);
    CHECK(result.trace.size() == 5);
}

TEST_CASE("solve trace maintains the inductive invariant") {
    std::mt19937_64 rng(313);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 4);
        const int m = static_cast<int>(rng() % 7);
        const Instance inst = test::random_instance(8000 + trial, n, m);
        const SolveResult result = solve(inst);

        GoodSet assigned;
        long long last_calls = 0;
        for (const auto& rec : result.trace) {
            CHECK(is_binary(rec.subsidies_after));
            CHECK(verify_envy_free(inst, {rec.allocation_after, rec.subsidies_after}));
            rec.allocation_after.validate(m);
            CHECK_FALSE(assigned.contains(rec.good));
            assigned.insert(rec.good);
            CHECK(rec.allocation_after.allocated() == assigned);
            CHECK(rec.oracle_calls_cum >= last_calls);
            last_calls = rec.oracle_calls_cum;
            if (rec.branch == Branch::Extended) {
                CHECK(rec.sigma.has_value());
                CHECK(rec.sink_trials == 0);
            } else {
                CHECK(rec.sink_trials >= 1);
                CHECK(rec.sink_trials <= n);
            }
        }
        CHECK(result.solution.allocation.is_complete(m));
    }
}

TEST_CASE("solve honors a custom good order") {
    const Instance inst = test::five_good_fixture();
    const SolveResult result = solve(inst, {.order = std::vector<int>{4, 3, 2, 1, 0}});
    CHECK(result.trace[0].good == 4);
    CHECK(result.solution.allocation.is_complete(5));
    CHECK(verify_envy_free(inst, result.solution));

    CHECK_THROWS_AS(solve(inst, {.order = std::vector<int>{0, 0, 1, 2, 3}}), ContractError);
}

TEST_CASE("solve rejects non-dichotomous valuations with a diagnostic") {
    // v({0,1}) jumps by 2 when good 1 arrives after good 0.
    std::vector<Valuation> vals;
    vals.push_back(Valuation::table(2, {0, 0, 0, 2}));
    vals.push_back(Valuation::additive(2, GoodSet{0}));
    const Instance inst(2, 2, std::move(vals));
    CHECK_THROWS_AS(solve(inst), NonDichotomousError);
    try {
        solve(inst);
    } catch (const NonDichotomousError& e) {
        CHECK(e.agent == 0);
        CHECK(e.good >= 0);
    }
}

TEST_CASE("solve accepts an unchecked but dichotomous threshold valuation") {
    std::vector<Valuation> vals;
    vals.push_back(Valuation::threshold(3, {GoodSet{0, 1}}));
    vals.push_back(Valuation::additive(3, GoodSet{2}));
    const Instance inst(2, 3, std::move(vals));
    REQUIRE_FALSE(inst.valuation(0).dichotomous_by_construction());
    const SolveResult result = solve(inst);
    CHECK(verify_envy_free(inst, result.solution));
    CHECK(inst.valuation(0).dichotomy_certified());
}
