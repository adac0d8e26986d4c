#include <algorithm>
#include <random>

#include "efs/io.hpp"

namespace efs {

namespace {

// Thin wrapper so every draw goes through one deterministic code path.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform in [0, bound).
    int below(int bound) { return static_cast<int>(engine_() % static_cast<std::uint64_t>(bound)); }

    // Uniform in [lo, hi].
    int between(int lo, int hi) { return lo + below(hi - lo + 1); }

    bool coin() { return engine_() & 1; }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

GoodSet random_subset(Rng& rng, int m) {
    GoodSet s;
    for (int g = 0; g < m; ++g)
        if (rng.coin()) s.insert(g);
    return s;
}

GoodSet random_nonempty_subset(Rng& rng, int m, int max_size) {
    const int size = rng.between(1, std::max(1, std::min(m, max_size)));
    GoodSet s;
    while (s.count() < size) s.insert(rng.below(m));
    return s;
}

Valuation random_additive(Rng& rng, int m) {
    return Valuation::additive(m, random_subset(rng, m));
}

Valuation random_capped_groups(Rng& rng, int m, int max_groups) {
    // Partition a random permutation prefix into disjoint groups.
    std::vector<int> goods(m);
    for (int g = 0; g < m; ++g) goods[g] = g;
    for (int g = m - 1; g > 0; --g) std::swap(goods[g], goods[rng.below(g + 1)]);

    const int group_count = rng.between(1, std::max(1, max_groups));
    std::vector<CappedGroup> groups(group_count);
    int used = m == 0 ? 0 : rng.between(0, m);
    for (int idx = 0; idx < used; ++idx)
        groups[rng.below(group_count)].goods.insert(goods[idx]);
    std::vector<CappedGroup> nonempty;
    for (auto& g : groups)
        if (!g.goods.empty()) {
            g.cap = rng.between(1, std::max<int>(1, g.goods.count()));
            nonempty.push_back(std::move(g));
        }
    return Valuation::capped_groups(m, std::move(nonempty));
}

Valuation random_threshold(Rng& rng, int m) {
    // Distinct singletons keep the marginals in {0,1} by construction.
    std::vector<GoodSet> required;
    for (int g : random_subset(rng, m).to_indices()) required.push_back(GoodSet{g});
    return Valuation::threshold(m, std::move(required));
}

Valuation random_bundle_packing(Rng& rng, int m, int max_sets, int max_set_size) {
    std::vector<GoodSet> demands;
    if (m > 0) {
        const int count = rng.between(1, std::max(1, max_sets));
        for (int i = 0; i < count; ++i)
            demands.push_back(random_nonempty_subset(rng, m, max_set_size));
    }
    return Valuation::bundle_packing(m, std::move(demands));
}

Valuation random_table(Rng& rng, int m, const GeneratorConfig& config) {
    // Tabulate a random dichotomous valuation; the stored table then
    // certifies as dichotomous on parse.
    const Valuation source = rng.coin()
        ? random_capped_groups(rng, m, config.max_groups)
        : random_bundle_packing(rng, m, config.max_demand_sets, config.max_demand_set_size);
    std::vector<Value> values(std::size_t{1} << m);
    for (std::uint64_t mask = 0; mask < values.size(); ++mask) {
        GoodSet s;
        for (int g = 0; g < m; ++g)
            if (mask & (std::uint64_t{1} << g)) s.insert(g);
        values[mask] = source.value(s);
    }
    Valuation table = Valuation::table(m, std::move(values));
    table.attach_dichotomy_certificate();
    return table;
}

} // namespace

InstanceDocument generate(const GeneratorConfig& config) {
    if (config.n < 1) throw ContractError("generator: n must be at least 1");
    if (config.m < 0) throw ContractError("generator: m must be nonnegative");
    double table_weight = config.table_weight;
    if (config.m > 12) table_weight = 0;  // tables get unwieldy past 2^12 entries
    const double weights[] = {config.additive_weight, config.capped_groups_weight,
                              config.threshold_weight, config.bundle_packing_weight,
                              table_weight};
    double total = 0;
    for (double w : weights) {
        if (w < 0) throw ContractError("generator: family weights must be nonnegative");
        total += w;
    }
    if (total <= 0) throw ContractError("generator: family weights must not all be zero");

    Rng rng(config.seed);
    std::vector<Valuation> valuations;
    valuations.reserve(config.n);
    for (int agent = 0; agent < config.n; ++agent) {
        // Weighted family pick from a deterministic 32-bit draw.
        const double roll = static_cast<double>(rng.raw() >> 32) /
                            static_cast<double>(std::uint64_t{1} << 32) * total;
        double acc = 0;
        int family = 0;
        for (int f = 0; f < 5; ++f) {
            acc += weights[f];
            if (roll < acc) {
                family = f;
                break;
            }
        }
        switch (family) {
        case 0: valuations.push_back(random_additive(rng, config.m)); break;
        case 1: valuations.push_back(random_capped_groups(rng, config.m, config.max_groups)); break;
        case 2: valuations.push_back(random_threshold(rng, config.m)); break;
        case 3:
            valuations.push_back(random_bundle_packing(rng, config.m, config.max_demand_sets,
                                                       config.max_demand_set_size));
            break;
        default: valuations.push_back(random_table(rng, config.m, config)); break;
        }
    }

    InstanceDocument doc{Instance(config.n, config.m, std::move(valuations)), config.name,
                         config.seed};
    return doc;
}

} // namespace efs
