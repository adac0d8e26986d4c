#include <chrono>
#include <filesystem>
#include <sstream>

#include "efs/io.hpp"

namespace efs {

namespace {

InstanceDocument load_bench_input(const std::string& path) {
    const std::string text = read_file(path);
    // A corpus entry is either an instance document or a generator config
    // to materialize first.
    try {
        return parse_instance(text);
    } catch (const ParseError&) {
        return generate(parse_generator_config(text));
    }
}

} // namespace

std::vector<BenchRow> run_bench(const std::vector<std::string>& paths) {
    std::vector<BenchRow> rows(paths.size());
    std::vector<std::string> errors(paths.size());

#pragma omp parallel for schedule(dynamic)
    for (std::int64_t idx = 0; idx < static_cast<std::int64_t>(paths.size()); ++idx) {
        try {
            const InstanceDocument doc = load_bench_input(paths[idx]);
            const Instance& inst = doc.instance;
            inst.reset_oracle_calls();

            const auto start = std::chrono::steady_clock::now();
            const SolveResult result = solve(inst);
            const auto stop = std::chrono::steady_clock::now();

            BenchRow& row = rows[idx];
            row.instance = std::filesystem::path(paths[idx]).filename().string();
            row.n = inst.n;
            row.m = inst.m;
            row.total_subsidy = total_subsidy(result.solution.subsidies);
            row.iterations = static_cast<int>(result.trace.size());
            for (const auto& rec : result.trace) row.findsink_trials += rec.sink_trials;
            row.oracle_calls = inst.total_oracle_calls();
            row.wall_ms =
                std::chrono::duration<double, std::milli>(stop - start).count();
        } catch (const std::exception& e) {
            errors[idx] = e.what();
        }
    }

    for (std::size_t idx = 0; idx < paths.size(); ++idx)
        if (!errors[idx].empty())
            throw Error("bench: " + paths[idx] + ": " + errors[idx]);
    return rows;
}

std::string bench_csv_header() {
    return "instance,n,m,total_subsidy,iterations,findsink_trials,oracle_calls,wall_ms";
}

std::string bench_csv_row(const BenchRow& row) {
    std::ostringstream os;
    std::string name = row.instance;
    for (char& c : name)
        if (c == ',' || c == '\n') c = '_';
    os << name << ',' << row.n << ',' << row.m << ',' << row.total_subsidy << ','
       << row.iterations << ',' << row.findsink_trials << ',' << row.oracle_calls << ','
       << row.wall_ms;
    return os.str();
}

} // namespace efs
