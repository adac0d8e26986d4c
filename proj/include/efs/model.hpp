#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "efs/error.hpp"

namespace efs {

// All values, weights and subsidies in this library are exact integers;
// there is no floating point in the core.
using Value = long long;

// A set of good indices, stored as a bitmask in 64-bit words. Trailing
// zero words are trimmed so equal sets compare equal and hash stably.
class GoodSet {
public:
    GoodSet() = default;
    GoodSet(std::initializer_list<int> goods);

    static GoodSet from_indices(const std::vector<int>& goods);
    static GoodSet full(int m);

    bool contains(int g) const;
    void insert(int g);
    void erase(int g);
    // Empties the set but keeps its storage for reuse in tight loops.
    void clear() { words_.clear(); }

    GoodSet with(int g) const;
    GoodSet without(int g) const;

    int count() const;
    bool empty() const { return words_.empty(); }

    int intersection_count(const GoodSet& other) const;
    bool intersects(const GoodSet& other) const;
    bool is_subset_of(const GoodSet& other) const;

    GoodSet united(const GoodSet& other) const;
    GoodSet intersected(const GoodSet& other) const;
    GoodSet minus(const GoodSet& other) const;

    // Largest good index, or -1 for the empty set.
    int max_good() const;

    std::vector<int> to_indices() const;

    // Bitmask index of the set; only valid when all goods fit in one word.
    // Used for table-backed valuations (m <= 20).
    std::uint64_t to_mask() const;

    std::size_t hash() const;

    bool operator==(const GoodSet& other) const { return words_ == other.words_; }

    // Readable form like "{0,3,4}" for diagnostics.
    std::string to_string() const;

private:
    std::vector<std::uint64_t> words_;
    void trim();
};

struct GoodSetHash {
    std::size_t operator()(const GoodSet& s) const { return s.hash(); }
};

// Monotone call counter, striped across cache lines so that concurrent
// oracle queries do not serialize on one atomic. Totals are exact.
class CallCounter {
public:
    void bump() const { slots_[slot_index()].count.fetch_add(1, std::memory_order_relaxed); }

    long long total() const {
        long long sum = 0;
        for (const auto& slot : slots_) sum += slot.count.load(std::memory_order_relaxed);
        return sum;
    }

    void reset() const {
        for (auto& slot : slots_) slot.count.store(0, std::memory_order_relaxed);
    }

private:
    struct alignas(64) Slot {
        std::atomic<long long> count{0};
    };
    static std::size_t slot_index();
    mutable std::array<Slot, 8> slots_;
};

// ---------------------------------------------------------------------------
// Valuation oracles
// ---------------------------------------------------------------------------

struct CappedGroup {
    GoodSet goods;
    Value cap = 1;
};

struct AdditiveParams {
    GoodSet valued;
};

// Sum of min(|S n G_k|, c_k) over pairwise disjoint groups. Disjointness
// keeps every marginal in {0,1}.
struct CappedGroupsParams {
    std::vector<CappedGroup> groups;
};

// Number of required sets fully contained in S.
struct ThresholdParams {
    std::vector<GoodSet> required;
};

// Maximum number of pairwise-disjoint demand sets contained in S.
struct BundlePackingParams {
    std::vector<GoodSet> demands;
};

// Explicit table of 2^m values indexed by subset bitmask.
struct TableParams {
    std::vector<Value> values;
};

// A monotone integer set function over subsets of [0, m), accessed through
// a value oracle. Construction validates the structural invariants of each
// family (v(empty) = 0, indices in range); dichotomy is either guaranteed
// by construction or must be certified explicitly (see oracle module).
class Valuation {
public:
    enum class Kind { Additive, CappedGroups, Threshold, BundlePacking, Table };

    static Valuation additive(int good_count, GoodSet valued);
    static Valuation capped_groups(int good_count, std::vector<CappedGroup> groups);
    static Valuation threshold(int good_count, std::vector<GoodSet> required);
    static Valuation bundle_packing(int good_count, std::vector<GoodSet> demands);
    static Valuation table(int good_count, std::vector<Value> values);

    Valuation(const Valuation& other);
    Valuation& operator=(const Valuation& other);
    Valuation(Valuation&&) noexcept = default;
    Valuation& operator=(Valuation&&) noexcept = default;

    Kind kind() const { return kind_; }
    int good_count() const { return good_count_; }

    // v(S). Increments the oracle-call counter.
    Value value(const GoodSet& s) const;

    // v(S u {g}) - v(S); g must not already be in S.
    Value marginal(const GoodSet& s, int g) const;

    // True for families whose marginals are in {0,1} by construction.
    bool dichotomous_by_construction() const;

    // dichotomous_by_construction() or an attached certificate.
    bool dichotomy_certified() const;

    // Called by oracle::check_dichotomous after an exhaustive pass.
    void attach_dichotomy_certificate() const { certified_.store(true); }

    // Monotone counter of value-oracle calls. Approximate only in the sense
    // that concurrent readers may observe a momentarily stale total.
    long long oracle_calls() const { return calls_.total(); }
    void reset_oracle_calls() const { calls_.reset(); }

    // Optional memoization of value queries, off by default.
    void set_memoization(bool on) const;

    const AdditiveParams& additive_params() const { return std::get<AdditiveParams>(params_); }
    const CappedGroupsParams& capped_groups_params() const { return std::get<CappedGroupsParams>(params_); }
    const ThresholdParams& threshold_params() const { return std::get<ThresholdParams>(params_); }
    const BundlePackingParams& bundle_packing_params() const { return std::get<BundlePackingParams>(params_); }
    const TableParams& table_params() const { return std::get<TableParams>(params_); }

private:
    using Params = std::variant<AdditiveParams, CappedGroupsParams, ThresholdParams,
                                BundlePackingParams, TableParams>;

    Valuation(Kind kind, int good_count, Params params);

    Value evaluate(const GoodSet& s) const;

    Kind kind_;
    int good_count_ = 0;
    Params params_;
    CallCounter calls_;
    mutable std::atomic<bool> certified_{false};

    struct Memo {
        std::mutex mutex;
        std::unordered_map<GoodSet, Value, GoodSetHash> cache;
    };
    mutable std::unique_ptr<Memo> memo_;
};

const char* to_string(Valuation::Kind kind);

// ---------------------------------------------------------------------------
// Instances, allocations, subsidies, permutations
// ---------------------------------------------------------------------------

struct Instance {
    int n = 0;
    int m = 0;
    std::vector<Valuation> valuations;

    Instance(int n_, int m_, std::vector<Valuation> valuations_);

    const Valuation& valuation(int agent) const { return valuations[agent]; }

    // Sum of all per-valuation oracle counters.
    long long total_oracle_calls() const;
    void reset_oracle_calls() const;
};

// An ordered list of n pairwise-disjoint bundles; may be partial.
class Allocation {
public:
    Allocation() = default;
    explicit Allocation(int n) : bundles_(n) {}
    explicit Allocation(std::vector<GoodSet> bundles);

    int agent_count() const { return static_cast<int>(bundles_.size()); }
    const GoodSet& bundle(int agent) const { return bundles_[agent]; }
    const std::vector<GoodSet>& bundles() const { return bundles_; }

    // Copy with g added to the given agent's bundle; g must be unallocated.
    Allocation with_good(int agent, int g) const;

    // Union of all bundles.
    GoodSet allocated() const;
    bool is_complete(int m) const;

    // Disjointness and index-range check; throws ContractError on violation.
    void validate(int m) const;

    bool operator==(const Allocation& other) const { return bundles_ == other.bundles_; }

private:
    std::vector<GoodSet> bundles_;
};

using SubsidyVector = std::vector<Value>;
using Permutation = std::vector<int>;

bool is_permutation(const Permutation& sigma, int n);
Permutation identity_permutation(int n);
Permutation inverse_permutation(const Permutation& sigma);

// Agent i of the result receives bundle sigma[i] of the input.
Allocation apply_permutation(const Allocation& a, const Permutation& sigma);

// Agent i of the result receives subsidy p[sigma[i]].
SubsidyVector apply_permutation(const SubsidyVector& p, const Permutation& sigma);

// All agents attaining max_i p_i; never empty.
std::vector<int> most_subsidized(const SubsidyVector& p);

bool is_binary(const SubsidyVector& p);
Value total_subsidy(const SubsidyVector& p);

} // namespace efs
