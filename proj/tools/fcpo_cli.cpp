// Command line front end for the optimizer benchmark harness.
//
// Subcommands:
//   run    one (case, algorithm, seed) cell, CSV row on stdout
//   bench  full benchmark matrix, writes results.csv and traces.jsonl
//   stats  statistics report from a results.csv
//   twin   activation calibration demo
//
// Every subcommand accepts --config FILE with key=value lines.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fcpo/harness.hpp"

namespace {

void add_config_option(CLI::App* app) {
    app->set_config("--config", "", "key=value configuration file");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fcpo benchmark harness"};
    app.require_subcommand(1);

    fcpo::harness::HarnessConfig cfg;
    bool sequential = false;
    std::string run_case_id = "F1_d10";
    std::string run_algo = "fcpo";
    std::string stats_input = "out/results.csv";
    std::string control = "fcpo";

    CLI::App* run = app.add_subcommand("run", "single optimization run");
    run->add_option("--seed", cfg.master_seed, "master seed");
    run->add_option("--budget", cfg.nfe_budget, "evaluation budget (0 = 1000*D)");
    run->add_option("--case", run_case_id, "benchmark case id, e.g. F3_d20");
    run->add_option("--algo", run_algo, "algorithm id")
        ->check(CLI::IsMember(fcpo::harness::known_algorithms()));
    add_config_option(run);

    CLI::App* bench = app.add_subcommand("bench", "full benchmark matrix");
    bench->add_option("--seed", cfg.master_seed, "master seed");
    bench->add_option("--runs", cfg.n_runs, "runs per (case, algorithm)")
        ->check(CLI::PositiveNumber);
    bench->add_option("--budget", cfg.nfe_budget, "evaluation budget (0 = 1000*D)");
    bench->add_option("--algos", cfg.algorithms, "algorithm ids")
        ->delimiter(',')
        ->check(CLI::IsMember(fcpo::harness::known_algorithms()));
    bench->add_option("--cases", cfg.cases, "case ids (default: all)")->delimiter(',');
    bench->add_flag("--no-zoom", cfg.no_zoom, "disable the exploration operator");
    bench->add_flag("--no-eigen", cfg.no_eigen, "disable the eigensystem machinery");
    bench->add_flag("--no-lpsr", cfg.no_lpsr, "disable population size reduction");
    bench->add_option("--out", cfg.out_dir, "output directory");
    bench->add_option("--parallel", cfg.parallelism, "worker thread count")
        ->check(CLI::PositiveNumber);
    bench->add_flag("--sequential", sequential, "force single-threaded execution");
    add_config_option(bench);

    CLI::App* stats = app.add_subcommand("stats", "statistics report");
    stats->add_option("--input", stats_input, "results.csv path");
    stats->add_option("--out", cfg.out_dir, "output directory");
    stats->add_option("--control", control, "control algorithm for post-hoc tests");
    add_config_option(stats);

    fcpo::harness::TwinConfig twin_cfg;
    CLI::App* twin = app.add_subcommand("twin", "activation calibration demo");
    twin->add_option("--seed", twin_cfg.master_seed, "master seed");
    twin->add_option("--runs", twin_cfg.n_runs, "number of calibration runs")
        ->check(CLI::PositiveNumber);
    twin->add_option("--budget", twin_cfg.nfe_budget, "evaluation budget per run")
        ->check(CLI::PositiveNumber);
    twin->add_option("--out", twin_cfg.out_dir, "output directory");
    add_config_option(twin);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            const auto cases = fcpo::harness::resolve_cases(
                [&] {
                    fcpo::harness::HarnessConfig c = cfg;
                    c.cases = {run_case_id};
                    return c;
                }());
            const auto& bc = cases.front();
            const fcpo::RunRecord rec = fcpo::harness::run_case(
                bc, run_algo, fcpo::derive_run_seed(cfg.master_seed, 0),
                cfg.budget_for(bc.dim));
            fcpo::harness::write_results_csv(std::cout, {rec});
        } else if (bench->parsed()) {
            if (sequential) cfg.parallelism = 1;
            const std::vector<fcpo::RunRecord> records = fcpo::harness::bench_matrix(cfg);
            fcpo::harness::write_bench_outputs(cfg, records);
            std::cout << "wrote " << records.size() << " runs to " << cfg.out_dir << "\n";
        } else if (stats->parsed()) {
            fcpo::harness::stats_report(stats_input, cfg.out_dir, control);
            std::cout << "wrote report to " << cfg.out_dir << "\n";
        } else if (twin->parsed()) {
            fcpo::harness::demo_twin(twin_cfg);
            std::cout << "wrote twin demo outputs to " << twin_cfg.out_dir << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
