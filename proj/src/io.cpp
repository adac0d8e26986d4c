#include "efs/io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "efs/oracle.hpp"

namespace efs {

using nlohmann::json;

namespace {

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
}

const json& require_field(const json& j, const char* field, const std::string& where) {
    auto it = j.find(field);
    if (it == j.end())
        throw ParseError(where + ": missing field \"" + field + "\"");
    return *it;
}

int require_int(const json& j, const char* field, const std::string& where) {
    const json& f = require_field(j, field, where);
    if (!f.is_number_integer())
        throw ParseError(where + ": field \"" + field + "\" must be an integer");
    return f.get<int>();
}

void check_version(const json& j, const std::string& where) {
    if (require_int(j, "schema_version", where) != kSchemaVersion)
        throw ParseError(where + ": unsupported schema_version");
}

GoodSet parse_good_set(const json& j, int m, const std::string& where) {
    if (!j.is_array())
        throw ParseError(where + ": good set must be an array of indices");
    GoodSet s;
    for (const auto& e : j) {
        if (!e.is_number_integer())
            throw ParseError(where + ": good index must be an integer");
        const int g = e.get<int>();
        if (g < 0 || g >= m)
            throw ParseError(where + ": good index " + std::to_string(g) +
                             " out of range [0, " + std::to_string(m) + ")");
        s.insert(g);
    }
    return s;
}

json good_set_to_json(const GoodSet& s) {
    return json(s.to_indices());
}

Valuation parse_valuation(const json& j, int m, int agent) {
    const std::string where = "valuations[" + std::to_string(agent) + "]";
    if (!j.is_object()) throw ParseError(where + ": must be an object");
    const json& kind_field = require_field(j, "kind", where);
    if (!kind_field.is_string()) throw ParseError(where + ": \"kind\" must be a string");
    const std::string kind = kind_field.get<std::string>();

    if (kind == "additive") {
        return Valuation::additive(
            m, parse_good_set(require_field(j, "valued_goods", where), m, where));
    }
    if (kind == "capped_groups") {
        const json& groups = require_field(j, "groups", where);
        if (!groups.is_array()) throw ParseError(where + ": \"groups\" must be an array");
        std::vector<CappedGroup> parsed;
        for (const auto& g : groups) {
            CappedGroup cg;
            cg.goods = parse_good_set(require_field(g, "goods", where), m, where);
            const json& cap = require_field(g, "cap", where);
            if (!cap.is_number_integer() || cap.get<long long>() < 0)
                throw ParseError(where + ": group cap must be a nonnegative integer");
            cg.cap = cap.get<Value>();
            parsed.push_back(std::move(cg));
        }
        try {
            return Valuation::capped_groups(m, std::move(parsed));
        } catch (const ContractError& e) {
            throw ParseError(where + ": " + e.what());
        }
    }
    if (kind == "threshold") {
        const json& sets = require_field(j, "required_sets", where);
        if (!sets.is_array()) throw ParseError(where + ": \"required_sets\" must be an array");
        std::vector<GoodSet> parsed;
        for (const auto& s : sets) parsed.push_back(parse_good_set(s, m, where));
        try {
            return Valuation::threshold(m, std::move(parsed));
        } catch (const ContractError& e) {
            throw ParseError(where + ": " + e.what());
        }
    }
    if (kind == "bundle_packing") {
        const json& sets = require_field(j, "demand_sets", where);
        if (!sets.is_array()) throw ParseError(where + ": \"demand_sets\" must be an array");
        std::vector<GoodSet> parsed;
        for (const auto& s : sets) parsed.push_back(parse_good_set(s, m, where));
        try {
            return Valuation::bundle_packing(m, std::move(parsed));
        } catch (const ContractError& e) {
            throw ParseError(where + ": " + e.what());
        }
    }
    if (kind == "table") {
        const json& values = require_field(j, "values", where);
        if (!values.is_array()) throw ParseError(where + ": \"values\" must be an array");
        if (m > 20) throw ParseError(where + ": table valuations support at most 20 goods");
        if (values.size() != (std::size_t{1} << m))
            throw ParseError(where + ": table must have exactly 2^m = " +
                             std::to_string(std::size_t{1} << m) + " values, got " +
                             std::to_string(values.size()));
        std::vector<Value> parsed;
        parsed.reserve(values.size());
        for (const auto& v : values) {
            if (!v.is_number_integer() || v.get<long long>() < 0)
                throw ParseError(where + ": table values must be nonnegative integers");
            parsed.push_back(v.get<Value>());
        }
        Valuation val = [&] {
            try {
                return Valuation::table(m, std::move(parsed));
            } catch (const ContractError& e) {
                throw ParseError(where + ": " + e.what());
            }
        }();
        const bool unchecked = j.value("unchecked", false);
        if (!unchecked) {
            const DichotomyReport report = check_dichotomous(val, m);
            if (!report.dichotomous) {
                const auto& c = *report.counterexample;
                throw ParseError(where + ": table is not dichotomous (marginal of good " +
                                 std::to_string(c.good) + " relative to " + c.set.to_string() +
                                 " is " + std::to_string(c.marginal) +
                                 "); set \"unchecked\": true to store it anyway");
            }
        }
        return val;
    }
    throw ParseError(where + ": unknown valuation kind \"" + kind + "\"");
}

json valuation_to_json(const Valuation& v) {
    json j;
    j["kind"] = to_string(v.kind());
    switch (v.kind()) {
    case Valuation::Kind::Additive:
        j["valued_goods"] = good_set_to_json(v.additive_params().valued);
        break;
    case Valuation::Kind::CappedGroups: {
        json groups = json::array();
        for (const auto& g : v.capped_groups_params().groups)
            groups.push_back({{"goods", good_set_to_json(g.goods)}, {"cap", g.cap}});
        j["groups"] = std::move(groups);
        break;
    }
    case Valuation::Kind::Threshold: {
        json sets = json::array();
        for (const auto& s : v.threshold_params().required) sets.push_back(good_set_to_json(s));
        j["required_sets"] = std::move(sets);
        break;
    }
    case Valuation::Kind::BundlePacking: {
        json sets = json::array();
        for (const auto& s : v.bundle_packing_params().demands)
            sets.push_back(good_set_to_json(s));
        j["demand_sets"] = std::move(sets);
        break;
    }
    case Valuation::Kind::Table:
        j["values"] = v.table_params().values;
        if (!v.dichotomy_certified()) j["unchecked"] = true;
        break;
    }
    return j;
}

} // namespace

InstanceDocument parse_instance(const std::string& text) {
    const json j = parse_json(text);
    if (!j.is_object()) throw ParseError("instance document must be a JSON object");
    check_version(j, "instance");
    const int n = require_int(j, "n", "instance");
    const int m = require_int(j, "m", "instance");
    if (n < 1) throw ParseError("instance: n must be at least 1");
    if (m < 0) throw ParseError("instance: m must be nonnegative");

    const json& vals = require_field(j, "valuations", "instance");
    if (!vals.is_array() || static_cast<int>(vals.size()) != n)
        throw ParseError("instance: \"valuations\" must be an array of n entries");
    std::vector<Valuation> valuations;
    valuations.reserve(n);
    for (int i = 0; i < n; ++i) valuations.push_back(parse_valuation(vals[i], m, i));

    InstanceDocument doc{Instance(n, m, std::move(valuations)), "", std::nullopt};
    doc.name = j.value("name", "");
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
            throw ParseError("instance: \"seed\" must be an integer");
        doc.seed = j["seed"].get<std::uint64_t>();
    }
    return doc;
}

std::string serialize_instance(const InstanceDocument& doc) {
    json j;
    j["schema_version"] = kSchemaVersion;
    if (!doc.name.empty()) j["name"] = doc.name;
    if (doc.seed) j["seed"] = *doc.seed;
    j["n"] = doc.instance.n;
    j["m"] = doc.instance.m;
    json vals = json::array();
    for (const auto& v : doc.instance.valuations) vals.push_back(valuation_to_json(v));
    j["valuations"] = std::move(vals);
    return j.dump(2) + "\n";
}

Solution parse_solution(const std::string& text, int n, int m) {
    const json j = parse_json(text);
    if (!j.is_object()) throw ParseError("solution document must be a JSON object");
    check_version(j, "solution");
    const json& bundles = require_field(j, "bundles", "solution");
    const json& subsidies = require_field(j, "subsidies", "solution");
    if (!bundles.is_array() || static_cast<int>(bundles.size()) != n)
        throw ParseError("solution: \"bundles\" must be an array of n good sets");
    if (!subsidies.is_array() || static_cast<int>(subsidies.size()) != n)
        throw ParseError("solution: \"subsidies\" must be an array of n integers");

    std::vector<GoodSet> parsed;
    for (const auto& b : bundles)
        parsed.push_back(parse_good_set(b, m, "solution"));
    SubsidyVector p;
    for (const auto& s : subsidies) {
        if (!s.is_number_integer() || s.get<long long>() < 0)
            throw ParseError("solution: subsidies must be nonnegative integers");
        p.push_back(s.get<Value>());
    }
    Allocation allocation(std::move(parsed));
    try {
        allocation.validate(m);
    } catch (const ContractError& e) {
        throw ParseError(std::string("solution: ") + e.what());
    }
    return Solution{std::move(allocation), std::move(p)};
}

std::string serialize_solution(const Solution& sol) {
    json j;
    j["schema_version"] = kSchemaVersion;
    json bundles = json::array();
    for (const auto& b : sol.allocation.bundles()) bundles.push_back(good_set_to_json(b));
    j["bundles"] = std::move(bundles);
    j["subsidies"] = sol.subsidies;
    j["total_subsidy"] = total_subsidy(sol.subsidies);
    return j.dump(2) + "\n";
}

std::vector<TraceRecord> parse_trace(const std::string& text, int n, int m) {
    const json j = parse_json(text);
    if (!j.is_object()) throw ParseError("trace document must be a JSON object");
    check_version(j, "trace");
    const json& records = require_field(j, "records", "trace");
    if (!records.is_array()) throw ParseError("trace: \"records\" must be an array");

    std::vector<TraceRecord> out;
    for (const auto& r : records) {
        TraceRecord rec;
        rec.t = require_int(r, "t", "trace record");
        rec.good = require_int(r, "good", "trace record");
        const std::string branch = require_field(r, "branch", "trace record").get<std::string>();
        if (branch == "extended")
            rec.branch = Branch::Extended;
        else if (branch == "sink")
            rec.branch = Branch::Sink;
        else
            throw ParseError("trace record: unknown branch \"" + branch + "\"");
        if (r.contains("sigma")) {
            Permutation sigma = r["sigma"].get<Permutation>();
            if (!is_permutation(sigma, n))
                throw ParseError("trace record: sigma is not a permutation");
            rec.sigma = std::move(sigma);
        }
        rec.receiver = require_int(r, "receiver", "trace record");
        std::vector<GoodSet> bundles;
        for (const auto& b : require_field(r, "allocation_after", "trace record"))
            bundles.push_back(parse_good_set(b, m, "trace record"));
        if (static_cast<int>(bundles.size()) != n)
            throw ParseError("trace record: allocation_after must have n bundles");
        rec.allocation_after = Allocation(std::move(bundles));
        rec.subsidies_after = require_field(r, "subsidies_after", "trace record")
                                  .get<SubsidyVector>();
        if (static_cast<int>(rec.subsidies_after.size()) != n)
            throw ParseError("trace record: subsidies_after must have n entries");
        rec.oracle_calls_cum = require_field(r, "oracle_calls_cum", "trace record")
                                   .get<long long>();
        rec.sink_trials = r.value("sink_trials", 0);
        out.push_back(std::move(rec));
    }
    return out;
}

std::string serialize_trace(const std::vector<TraceRecord>& trace) {
    json records = json::array();
    for (const auto& rec : trace) {
        json r;
        r["t"] = rec.t;
        r["good"] = rec.good;
        r["branch"] = rec.branch == Branch::Extended ? "extended" : "sink";
        if (rec.sigma) r["sigma"] = *rec.sigma;
        r["receiver"] = rec.receiver;
        json bundles = json::array();
        for (const auto& b : rec.allocation_after.bundles()) bundles.push_back(good_set_to_json(b));
        r["allocation_after"] = std::move(bundles);
        r["subsidies_after"] = rec.subsidies_after;
        r["oracle_calls_cum"] = rec.oracle_calls_cum;
        if (rec.branch == Branch::Sink) r["sink_trials"] = rec.sink_trials;
        records.push_back(std::move(r));
    }
    json j;
    j["schema_version"] = kSchemaVersion;
    j["records"] = std::move(records);
    return j.dump(2) + "\n";
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path);
    out << contents;
}

GeneratorConfig parse_generator_config(const std::string& text) {
    const json j = parse_json(text);
    if (!j.is_object()) throw ParseError("generator config must be a JSON object");
    check_version(j, "generator config");
    GeneratorConfig config;
    config.n = require_int(j, "n", "generator config");
    config.m = require_int(j, "m", "generator config");
    if (config.n < 1) throw ParseError("generator config: n must be at least 1");
    if (config.m < 0) throw ParseError("generator config: m must be nonnegative");
    const json& seed = require_field(j, "seed", "generator config");
    if (!seed.is_number_integer() && !seed.is_number_unsigned())
        throw ParseError("generator config: \"seed\" must be an integer");
    config.seed = seed.get<std::uint64_t>();

    if (j.contains("families")) {
        const json& fam = j["families"];
        if (!fam.is_object())
            throw ParseError("generator config: \"families\" must be an object");
        config.additive_weight = fam.value("additive", 0.0);
        config.capped_groups_weight = fam.value("capped_groups", 0.0);
        config.threshold_weight = fam.value("threshold", 0.0);
        config.bundle_packing_weight = fam.value("bundle_packing", 0.0);
        config.table_weight = fam.value("table", 0.0);
        for (double w : {config.additive_weight, config.capped_groups_weight,
                         config.threshold_weight, config.bundle_packing_weight,
                         config.table_weight})
            if (w < 0) throw ParseError("generator config: family weights must be nonnegative");
        if (config.additive_weight + config.capped_groups_weight + config.threshold_weight +
                config.bundle_packing_weight + config.table_weight <= 0)
            throw ParseError("generator config: family weights must not all be zero");
    }
    config.max_groups = j.value("max_groups", config.max_groups);
    config.max_demand_sets = j.value("max_demand_sets", config.max_demand_sets);
    config.max_demand_set_size = j.value("max_demand_set_size", config.max_demand_set_size);
    config.name = j.value("name", "");
    return config;
}

std::string serialize_generator_config(const GeneratorConfig& config) {
    json j;
    j["schema_version"] = kSchemaVersion;
    if (!config.name.empty()) j["name"] = config.name;
    j["n"] = config.n;
    j["m"] = config.m;
    j["seed"] = config.seed;
    j["families"] = {{"additive", config.additive_weight},
                     {"capped_groups", config.capped_groups_weight},
                     {"threshold", config.threshold_weight},
                     {"bundle_packing", config.bundle_packing_weight},
                     {"table", config.table_weight}};
    j["max_groups"] = config.max_groups;
    j["max_demand_sets"] = config.max_demand_sets;
    j["max_demand_set_size"] = config.max_demand_set_size;
    return j.dump(2) + "\n";
}

} // namespace efs
