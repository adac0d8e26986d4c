#include "efs/model.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <sstream>

namespace efs {

// ---------------------------------------------------------------------------
// GoodSet
// ---------------------------------------------------------------------------

GoodSet::GoodSet(std::initializer_list<int> goods) {
    for (int g : goods) insert(g);
}

GoodSet GoodSet::from_indices(const std::vector<int>& goods) {
    GoodSet s;
    for (int g : goods) s.insert(g);
    return s;
}

GoodSet GoodSet::full(int m) {
    GoodSet s;
    for (int g = 0; g < m; ++g) s.insert(g);
    return s;
}

bool GoodSet::contains(int g) const {
    if (g < 0) throw InvalidQueryError("negative good index");
    const std::size_t w = static_cast<std::size_t>(g) / 64;
    if (w >= words_.size()) return false;
    return (words_[w] >> (g % 64)) & 1u;
}

void GoodSet::insert(int g) {
    if (g < 0) throw InvalidQueryError("negative good index");
    const std::size_t w = static_cast<std::size_t>(g) / 64;
    if (w >= words_.size()) words_.resize(w + 1, 0);
    words_[w] |= std::uint64_t{1} << (g % 64);
}

void GoodSet::erase(int g) {
    if (g < 0) throw InvalidQueryError("negative good index");
    const std::size_t w = static_cast<std::size_t>(g) / 64;
    if (w >= words_.size()) return;
    words_[w] &= ~(std::uint64_t{1} << (g % 64));
    trim();
}

GoodSet GoodSet::with(int g) const {
    GoodSet s = *this;
    s.insert(g);
    return s;
}

GoodSet GoodSet::without(int g) const {
    GoodSet s = *this;
    s.erase(g);
    return s;
}

int GoodSet::count() const {
    int c = 0;
    for (std::uint64_t w : words_) c += std::popcount(w);
    return c;
}

int GoodSet::intersection_count(const GoodSet& other) const {
    const std::size_t k = std::min(words_.size(), other.words_.size());
    int c = 0;
    for (std::size_t i = 0; i < k; ++i) c += std::popcount(words_[i] & other.words_[i]);
    return c;
}

bool GoodSet::intersects(const GoodSet& other) const {
    const std::size_t k = std::min(words_.size(), other.words_.size());
    for (std::size_t i = 0; i < k; ++i)
        if (words_[i] & other.words_[i]) return true;
    return false;
}

bool GoodSet::is_subset_of(const GoodSet& other) const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
        const std::uint64_t o = i < other.words_.size() ? other.words_[i] : 0;
        if (words_[i] & ~o) return false;
    }
    return true;
}

GoodSet GoodSet::united(const GoodSet& other) const {
    GoodSet s;
    s.words_.resize(std::max(words_.size(), other.words_.size()), 0);
    for (std::size_t i = 0; i < s.words_.size(); ++i) {
        const std::uint64_t a = i < words_.size() ? words_[i] : 0;
        const std::uint64_t b = i < other.words_.size() ? other.words_[i] : 0;
        s.words_[i] = a | b;
    }
    s.trim();
    return s;
}

GoodSet GoodSet::intersected(const GoodSet& other) const {
    GoodSet s;
    s.words_.resize(std::min(words_.size(), other.words_.size()), 0);
    for (std::size_t i = 0; i < s.words_.size(); ++i) s.words_[i] = words_[i] & other.words_[i];
    s.trim();
    return s;
}

GoodSet GoodSet::minus(const GoodSet& other) const {
    GoodSet s = *this;
    const std::size_t k = std::min(words_.size(), other.words_.size());
    for (std::size_t i = 0; i < k; ++i) s.words_[i] &= ~other.words_[i];
    s.trim();
    return s;
}

int GoodSet::max_good() const {
    if (words_.empty()) return -1;
    const std::size_t w = words_.size() - 1;
    return static_cast<int>(w * 64 + 63 - std::countl_zero(words_[w]));
}

std::vector<int> GoodSet::to_indices() const {
    std::vector<int> out;
    for (std::size_t w = 0; w < words_.size(); ++w) {
        std::uint64_t bits = words_[w];
        while (bits) {
            const int b = std::countr_zero(bits);
            out.push_back(static_cast<int>(w * 64 + b));
            bits &= bits - 1;
        }
    }
    return out;
}

std::uint64_t GoodSet::to_mask() const {
    if (words_.size() > 1)
        throw InvalidQueryError("good set does not fit in a single bitmask word");
    return words_.empty() ? 0 : words_[0];
}

std::size_t GoodSet::hash() const {
    std::size_t h = 1469598103934665603ull;
    for (std::uint64_t w : words_) {
        h ^= static_cast<std::size_t>(w);
        h *= 1099511628211ull;
    }
    return h;
}

std::string GoodSet::to_string() const {
    std::ostringstream os;
    os << '{';
    bool first = true;
    for (int g : to_indices()) {
        if (!first) os << ',';
        os << g;
        first = false;
    }
    os << '}';
    return os.str();
}

void GoodSet::trim() {
    while (!words_.empty() && words_.back() == 0) words_.pop_back();
}

// ---------------------------------------------------------------------------
// Valuation
// ---------------------------------------------------------------------------

namespace {

void require_in_range(const GoodSet& s, int m, const char* what) {
    if (s.max_good() >= m)
        throw InvalidQueryError(std::string(what) + ": good index " +
                                std::to_string(s.max_good()) + " out of range (m=" +
                                std::to_string(m) + ")");
}

// Max number of pairwise-disjoint demand sets contained in `s`, by
// branching over the (few) demand sets contained in s.
Value max_packing(const std::vector<GoodSet>& contained, std::size_t idx, const GoodSet& used) {
    Value best = 0;
    for (std::size_t i = idx; i < contained.size(); ++i) {
        if (contained[i].intersects(used)) continue;
        const Value take = 1 + max_packing(contained, i + 1, used.united(contained[i]));
        best = std::max(best, take);
        if (best >= static_cast<Value>(contained.size() - idx)) break;
    }
    return best;
}

} // namespace

Valuation::Valuation(Kind kind, int good_count, Params params)
    : kind_(kind), good_count_(good_count), params_(std::move(params)) {
    if (good_count < 0) throw ContractError("good count must be nonnegative");
}

std::size_t CallCounter::slot_index() {
    static std::atomic<std::size_t> next{0};
    thread_local const std::size_t slot = next.fetch_add(1) % 8;
    return slot;
}

Valuation::Valuation(const Valuation& other)
    : kind_(other.kind_), good_count_(other.good_count_), params_(other.params_) {
    certified_.store(other.certified_.load());
}

Valuation& Valuation::operator=(const Valuation& other) {
    kind_ = other.kind_;
    good_count_ = other.good_count_;
    params_ = other.params_;
    calls_.reset();
    certified_.store(other.certified_.load());
    memo_.reset();
    return *this;
}

Valuation Valuation::additive(int good_count, GoodSet valued) {
    require_in_range(valued, good_count, "additive valuation");
    return Valuation(Kind::Additive, good_count, AdditiveParams{std::move(valued)});
}

Valuation Valuation::capped_groups(int good_count, std::vector<CappedGroup> groups) {
    GoodSet seen;
    for (const auto& g : groups) {
        require_in_range(g.goods, good_count, "capped group");
        if (g.cap < 0) throw ContractError("group cap must be nonnegative");
        if (g.goods.intersects(seen))
            throw ContractError("capped groups must be pairwise disjoint");
        seen = seen.united(g.goods);
    }
    return Valuation(Kind::CappedGroups, good_count, CappedGroupsParams{std::move(groups)});
}

Valuation Valuation::threshold(int good_count, std::vector<GoodSet> required) {
    for (const auto& r : required) {
        require_in_range(r, good_count, "threshold set");
        if (r.empty()) throw ContractError("threshold sets must be nonempty");
    }
    return Valuation(Kind::Threshold, good_count, ThresholdParams{std::move(required)});
}

Valuation Valuation::bundle_packing(int good_count, std::vector<GoodSet> demands) {
    if (demands.size() > 22)
        throw ContractError("bundle packing supports at most 22 demand sets");
    for (const auto& d : demands) {
        require_in_range(d, good_count, "demand set");
        if (d.empty()) throw ContractError("demand sets must be nonempty");
    }
    return Valuation(Kind::BundlePacking, good_count, BundlePackingParams{std::move(demands)});
}

Valuation Valuation::table(int good_count, std::vector<Value> values) {
    if (good_count > 20) throw ContractError("table valuations support at most 20 goods");
    if (values.size() != (std::size_t{1} << good_count))
        throw ContractError("table must have exactly 2^m entries, got " +
                            std::to_string(values.size()));
    if (values[0] != 0) throw ContractError("table value of the empty set must be 0");
    for (Value v : values)
        if (v < 0) throw ContractError("table values must be nonnegative");
    // Monotonicity: flipping any one good on may not decrease the value.
    const std::uint64_t full = values.size() - 1;
    for (std::uint64_t mask = 0; mask <= full; ++mask)
        for (int g = 0; g < good_count; ++g) {
            const std::uint64_t bit = std::uint64_t{1} << g;
            if (!(mask & bit) && values[mask | bit] < values[mask])
                throw ContractError("table valuation is not monotone at mask " +
                                    std::to_string(mask) + ", good " + std::to_string(g));
        }
    return Valuation(Kind::Table, good_count, TableParams{std::move(values)});
}

Value Valuation::evaluate(const GoodSet& s) const {
    switch (kind_) {
    case Kind::Additive:
        return s.intersection_count(std::get<AdditiveParams>(params_).valued);
    case Kind::CappedGroups: {
        Value total = 0;
        for (const auto& g : std::get<CappedGroupsParams>(params_).groups)
            total += std::min<Value>(s.intersection_count(g.goods), g.cap);
        return total;
    }
    case Kind::Threshold: {
        Value total = 0;
        for (const auto& r : std::get<ThresholdParams>(params_).required)
            if (r.is_subset_of(s)) ++total;
        return total;
    }
    case Kind::BundlePacking: {
        std::vector<GoodSet> contained;
        for (const auto& d : std::get<BundlePackingParams>(params_).demands)
            if (d.is_subset_of(s)) contained.push_back(d);
        return max_packing(contained, 0, GoodSet{});
    }
    case Kind::Table:
        return std::get<TableParams>(params_).values[s.to_mask()];
    }
    throw Error("unreachable");
}

Value Valuation::value(const GoodSet& s) const {
    require_in_range(s, good_count_, "value query");
    calls_.bump();
    if (memo_) {
        std::lock_guard<std::mutex> lock(memo_->mutex);
        auto it = memo_->cache.find(s);
        if (it != memo_->cache.end()) return it->second;
        const Value v = evaluate(s);
        memo_->cache.emplace(s, v);
        return v;
    }
    return evaluate(s);
}

Value Valuation::marginal(const GoodSet& s, int g) const {
    if (s.contains(g))
        throw InvalidQueryError("marginal query for good " + std::to_string(g) +
                                " already in " + s.to_string());
    return value(s.with(g)) - value(s);
}

bool Valuation::dichotomous_by_construction() const {
    switch (kind_) {
    case Kind::Additive:
    case Kind::CappedGroups:
        return true;
    case Kind::BundlePacking:
        // Removing from any packing the one set that covers the new good
        // shows the marginal is at most one.
        return true;
    case Kind::Threshold: {
        // Only distinct singletons guarantee unit marginals.
        const auto& required = std::get<ThresholdParams>(params_).required;
        for (std::size_t i = 0; i < required.size(); ++i) {
            if (required[i].count() != 1) return false;
            for (std::size_t j = i + 1; j < required.size(); ++j)
                if (required[i] == required[j]) return false;
        }
        return true;
    }
    case Kind::Table:
        return false;
    }
    return false;
}

bool Valuation::dichotomy_certified() const {
    return dichotomous_by_construction() || certified_.load();
}

void Valuation::set_memoization(bool on) const {
    if (on && !memo_) memo_ = std::make_unique<Memo>();
    if (!on) memo_.reset();
}

const char* to_string(Valuation::Kind kind) {
    switch (kind) {
    case Valuation::Kind::Additive: return "additive";
    case Valuation::Kind::CappedGroups: return "capped_groups";
    case Valuation::Kind::Threshold: return "threshold";
    case Valuation::Kind::BundlePacking: return "bundle_packing";
    case Valuation::Kind::Table: return "table";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Instance
// ---------------------------------------------------------------------------

Instance::Instance(int n_, int m_, std::vector<Valuation> valuations_)
    : n(n_), m(m_), valuations(std::move(valuations_)) {
    if (n < 1) throw ContractError("instance needs at least one agent");
    if (m < 0) throw ContractError("good count must be nonnegative");
    if (static_cast<int>(valuations.size()) != n)
        throw ContractError("instance needs exactly one valuation per agent");
    for (const auto& v : valuations)
        if (v.good_count() != m)
            throw ContractError("valuation good count does not match instance");
}

long long Instance::total_oracle_calls() const {
    long long total = 0;
    for (const auto& v : valuations) total += v.oracle_calls();
    return total;
}

void Instance::reset_oracle_calls() const {
    for (const auto& v : valuations) v.reset_oracle_calls();
}

// ---------------------------------------------------------------------------
// Allocation
// ---------------------------------------------------------------------------

Allocation::Allocation(std::vector<GoodSet> bundles) : bundles_(std::move(bundles)) {}

Allocation Allocation::with_good(int agent, int g) const {
    if (agent < 0 || agent >= agent_count())
        throw ContractError("agent index out of range");
    if (allocated().contains(g))
        throw ContractError("good " + std::to_string(g) + " is already allocated");
    Allocation a = *this;
    a.bundles_[agent].insert(g);
    return a;
}

GoodSet Allocation::allocated() const {
    GoodSet all;
    for (const auto& b : bundles_) all = all.united(b);
    return all;
}

bool Allocation::is_complete(int m) const {
    return allocated().count() == m;
}

void Allocation::validate(int m) const {
    GoodSet seen;
    for (int i = 0; i < agent_count(); ++i) {
        if (bundles_[i].max_good() >= m)
            throw ContractError("bundle " + std::to_string(i) + " contains good " +
                                std::to_string(bundles_[i].max_good()) +
                                " outside the instance");
        if (bundles_[i].intersects(seen))
            throw ContractError("bundles are not pairwise disjoint at agent " +
                                std::to_string(i));
        seen = seen.united(bundles_[i]);
    }
}

// ---------------------------------------------------------------------------
// Permutations & subsidies
// ---------------------------------------------------------------------------

bool is_permutation(const Permutation& sigma, int n) {
    if (static_cast<int>(sigma.size()) != n) return false;
    std::vector<char> seen(n, 0);
    for (int v : sigma) {
        if (v < 0 || v >= n || seen[v]) return false;
        seen[v] = 1;
    }
    return true;
}

Permutation identity_permutation(int n) {
    Permutation sigma(n);
    std::iota(sigma.begin(), sigma.end(), 0);
    return sigma;
}

Permutation inverse_permutation(const Permutation& sigma) {
    Permutation inv(sigma.size());
    for (std::size_t i = 0; i < sigma.size(); ++i) inv[sigma[i]] = static_cast<int>(i);
    return inv;
}

Allocation apply_permutation(const Allocation& a, const Permutation& sigma) {
    if (!is_permutation(sigma, a.agent_count()))
        throw ContractError("sigma is not a permutation of the agents");
    std::vector<GoodSet> bundles(a.agent_count());
    for (int i = 0; i < a.agent_count(); ++i) bundles[i] = a.bundle(sigma[i]);
    return Allocation(std::move(bundles));
}

SubsidyVector apply_permutation(const SubsidyVector& p, const Permutation& sigma) {
    if (!is_permutation(sigma, static_cast<int>(p.size())))
        throw ContractError("sigma is not a permutation of the agents");
    SubsidyVector out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[sigma[i]];
    return out;
}

std::vector<int> most_subsidized(const SubsidyVector& p) {
    if (p.empty()) throw ContractError("empty subsidy vector");
    const Value mx = *std::max_element(p.begin(), p.end());
    std::vector<int> out;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] == mx) out.push_back(static_cast<int>(i));
    return out;
}

bool is_binary(const SubsidyVector& p) {
    return std::all_of(p.begin(), p.end(), [](Value v) { return v == 0 || v == 1; });
}

Value total_subsidy(const SubsidyVector& p) {
    return std::accumulate(p.begin(), p.end(), Value{0});
}

} // namespace efs
