#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "efs/io.hpp"
#include "efs/oracle.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using namespace efs;

std::vector<int> parse_order(const std::string& spec, int m) {
    std::vector<int> order(m);
    for (int g = 0; g < m; ++g) order[g] = g;
    if (spec == "idx") return order;
    try {
        if (spec.rfind("seed:", 0) == 0) {
            std::mt19937_64 rng(std::stoull(spec.substr(5)));
            for (int g = m - 1; g > 0; --g)
                std::swap(order[g], order[rng() % static_cast<std::uint64_t>(g + 1)]);
            return order;
        }
        order.clear();
        std::string token;
        std::istringstream in(spec);
        while (std::getline(in, token, ',')) order.push_back(std::stoi(token));
    } catch (const std::logic_error&) {
        throw ContractError("--order must be \"idx\", a comma-separated permutation of 0.." +
                            std::to_string(m - 1) + ", or seed:N");
    }
    if (!is_permutation(order, m))
        throw ContractError("--order must be a permutation of 0.." + std::to_string(m - 1) +
                            " or seed:N");
    return order;
}

void print_solution(const Solution& sol, const Instance& inst) {
    for (int i = 0; i < inst.n; ++i) {
        std::cout << "agent " << i << ": goods " << sol.allocation.bundle(i).to_string()
                  << "  value " << inst.valuation(i).value(sol.allocation.bundle(i))
                  << "  subsidy " << sol.subsidies[i] << "\n";
    }
    std::cout << "total subsidy: " << total_subsidy(sol.subsidies) << "\n";
}

int cmd_solve(const std::string& instance_path, const std::string& order_spec,
              const std::string& trace_path, const std::string& out_path) {
    const InstanceDocument doc = parse_instance(read_file(instance_path));
    SolveOptions options;
    if (!order_spec.empty()) options.order = parse_order(order_spec, doc.instance.m);

    const SolveResult result = solve(doc.instance, options);
    print_solution(result.solution, doc.instance);
    if (!trace_path.empty()) write_file(trace_path, serialize_trace(result.trace));
    if (!out_path.empty()) write_file(out_path, serialize_solution(result.solution));
    return 0;
}

int cmd_verify(const std::string& instance_path, const std::string& solution_path) {
    const InstanceDocument doc = parse_instance(read_file(instance_path));
    const Solution sol = parse_solution(read_file(solution_path), doc.instance.n, doc.instance.m);
    const auto violation = find_envy_violation(doc.instance, sol);
    if (!violation) {
        std::cout << "envy-free\n";
        return 0;
    }
    const auto [i, j] = *violation;
    const Value own = doc.instance.valuation(i).value(sol.allocation.bundle(i));
    const Value other = doc.instance.valuation(i).value(sol.allocation.bundle(j));
    std::cout << "envy violation: agent " << i << " envies agent " << j << " (" << own << "+"
              << sol.subsidies[i] << " < " << other << "+" << sol.subsidies[j] << ")\n";
    return 1;
}

int cmd_check(const std::string& instance_path, int samples) {
    const InstanceDocument doc = parse_instance(read_file(instance_path));
    const Instance& inst = doc.instance;
    bool clean = true;
    for (int i = 0; i < inst.n; ++i) {
        DichotomyReport report;
        if (inst.m <= 20) {
            report = check_dichotomous(inst.valuation(i), inst.m);
        } else {
            report = sample_dichotomous(inst.valuation(i), inst.m, samples, 1);
        }
        if (report.dichotomous) {
            std::cout << "agent " << i << ": dichotomous"
                      << (inst.m <= 20 ? "" : " (sampled)") << "\n";
        } else {
            const auto& c = *report.counterexample;
            std::cout << "agent " << i << ": NOT dichotomous, marginal of good " << c.good
                      << " relative to " << c.set.to_string() << " is " << c.marginal << "\n";
            clean = false;
        }
    }
    return clean ? 0 : 1;
}

int cmd_gen(const std::string& config_path, const std::string& out_path) {
    const GeneratorConfig config = parse_generator_config(read_file(config_path));
    write_file(out_path, serialize_instance(generate(config)));
    return 0;
}

int cmd_ef1(const std::string& instance_path, const std::string& solution_path) {
    const InstanceDocument doc = parse_instance(read_file(instance_path));
    const Solution sol = parse_solution(read_file(solution_path), doc.instance.n, doc.instance.m);
    if (!sol.allocation.is_complete(doc.instance.m))
        throw ContractError("ef1 requires a complete allocation");
    const Ef1Report report = check_ef1(doc.instance, sol.allocation);
    if (report.ef1) {
        std::cout << "EF1\n";
        return 0;
    }
    std::cout << "NOT EF1, witness (" << report.witness->first << "," << report.witness->second
              << ")\n";
    return 1;
}

int cmd_bench(const std::string& dir) {
    std::vector<std::string> paths;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json")
            paths.push_back(entry.path().string());
    std::sort(paths.begin(), paths.end());

    std::cout << bench_csv_header() << "\n";
    for (const BenchRow& row : run_bench(paths)) std::cout << bench_csv_row(row) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
#ifdef _OPENMP
    if (const char* threads = std::getenv("EFS_THREADS"))
        omp_set_num_threads(std::max(1, std::atoi(threads)));
#endif

    CLI::App app{"envy-free allocation with 0/1 subsidies for dichotomous valuations"};
    app.require_subcommand(1);

    std::string instance_path, solution_path, config_path, out_path, trace_path, order_spec, dir;
    int samples = 10000;

    auto* solve_cmd = app.add_subcommand("solve", "solve an instance");
    solve_cmd->add_option("instance", instance_path, "instance document")->required();
    solve_cmd->add_option("--order", order_spec,
                          "good order: comma-separated indices or seed:N");
    solve_cmd->add_option("--trace", trace_path, "write the iteration trace to this file");
    solve_cmd->add_option("-o,--out", out_path, "write the solution document to this file");

    auto* verify_cmd = app.add_subcommand("verify", "check a solution for envy-freeness");
    verify_cmd->add_option("instance", instance_path, "instance document")->required();
    verify_cmd->add_option("solution", solution_path, "solution document")->required();

    auto* check_cmd = app.add_subcommand("check", "dichotomy report for an instance");
    check_cmd->add_option("instance", instance_path, "instance document")->required();
    check_cmd->add_option("--samples", samples, "sample count when m > 20");

    auto* gen_cmd = app.add_subcommand("gen", "generate a random instance");
    gen_cmd->add_option("config", config_path, "generator config")->required();
    gen_cmd->add_option("-o,--out", out_path, "output instance file")->required();

    auto* ef1_cmd = app.add_subcommand("ef1", "check a solution's allocation for EF1");
    ef1_cmd->add_option("instance", instance_path, "instance document")->required();
    ef1_cmd->add_option("solution", solution_path, "solution document")->required();

    auto* bench_cmd = app.add_subcommand("bench", "solve a corpus, emit CSV rows");
    bench_cmd->add_option("dir", dir, "directory of instance/config JSON files")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve_cmd->parsed()) return cmd_solve(instance_path, order_spec, trace_path, out_path);
        if (verify_cmd->parsed()) return cmd_verify(instance_path, solution_path);
        if (check_cmd->parsed()) return cmd_check(instance_path, samples);
        if (gen_cmd->parsed()) return cmd_gen(config_path, out_path);
        if (ef1_cmd->parsed()) return cmd_ef1(instance_path, solution_path);
        if (bench_cmd->parsed()) return cmd_bench(dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
