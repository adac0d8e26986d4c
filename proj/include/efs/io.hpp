#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "efs/model.hpp"
#include "efs/solver.hpp"

namespace efs {

// Instance file contents: the instance plus optional metadata.
struct InstanceDocument {
    Instance instance;
    std::string name;
    std::optional<std::uint64_t> seed;
};

// Versioned JSON documents; good sets are sorted index arrays.
inline constexpr int kSchemaVersion = 1;

InstanceDocument parse_instance(const std::string& text);
std::string serialize_instance(const InstanceDocument& doc);

Solution parse_solution(const std::string& text, int n, int m);
std::string serialize_solution(const Solution& sol);

std::vector<TraceRecord> parse_trace(const std::string& text, int n, int m);
std::string serialize_trace(const std::vector<TraceRecord>& trace);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

// ---------------------------------------------------------------------------
// Random instance generation
// ---------------------------------------------------------------------------

struct GeneratorConfig {
    int n = 2;
    int m = 4;
    std::uint64_t seed = 0;
    // Relative weights per valuation kind; nonnegative, not all zero.
    // Generated valuations are dichotomous by construction: thresholds use
    // distinct singletons and tables are built by tabulating a random
    // capped-groups or packing valuation (m <= 12).
    double additive_weight = 1.0;
    double capped_groups_weight = 1.0;
    double threshold_weight = 1.0;
    double bundle_packing_weight = 1.0;
    double table_weight = 0.0;
    // Family-specific parameter ranges.
    int max_groups = 3;
    int max_demand_sets = 5;
    int max_demand_set_size = 3;
    std::string name;
};

GeneratorConfig parse_generator_config(const std::string& text);
std::string serialize_generator_config(const GeneratorConfig& config);

// Deterministic per seed.
InstanceDocument generate(const GeneratorConfig& config);

// ---------------------------------------------------------------------------
// Benchmark harness
// ---------------------------------------------------------------------------

struct BenchRow {
    std::string instance;
    int n = 0;
    int m = 0;
    Value total_subsidy = 0;
    int iterations = 0;
    int findsink_trials = 0;
    long long oracle_calls = 0;
    double wall_ms = 0.0;
};

// Runs solve on each file (instance documents, or generator configs which
// are materialized first). Rows come back in input order; instances may be
// processed by parallel workers.
std::vector<BenchRow> run_bench(const std::vector<std::string>& paths);

std::string bench_csv_header();
std::string bench_csv_row(const BenchRow& row);

} // namespace efs
