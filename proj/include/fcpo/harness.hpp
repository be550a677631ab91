#pragma once

// Benchmark harness: configuration, case execution, benchmark matrix with
// CSV/JSONL persistence, statistics reporting and the twin demo.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "fcpo/baselines.hpp"
#include "fcpo/benchmarks.hpp"
#include "fcpo/core.hpp"
#include "fcpo/optimizer.hpp"
#include "fcpo/stats.hpp"
#include "fcpo/twin.hpp"

namespace fcpo::harness {

struct HarnessConfig {
    std::uint64_t master_seed = 42;
    int n_runs = 30;
    long long nfe_budget = 0;  // 0 -> 1000 * D (desk-scale default)
    std::vector<std::string> algorithms = {"fcpo", "pso", "shade", "lshade", "cmaes"};
    std::vector<std::string> cases;  // case ids like "F1_d10"; empty -> all ten
    bool no_zoom = false;
    bool no_eigen = false;
    bool no_lpsr = false;
    int parallelism = 1;
    std::string out_dir = "out";

    long long budget_for(int dim) const {
        return nfe_budget > 0 ? nfe_budget : 1000LL * dim;
    }
};

inline const std::vector<std::string>& known_algorithms() {
    static const std::vector<std::string> ids = {
        "fcpo", "fcpo_nozoom", "fcpo_noeigen", "fcpo_nolpsr",
        "pso", "shade", "lshade", "cmaes"};
    return ids;
}

// Run one (case, algorithm, seed) cell under a fresh budget, timing the run
// with a monotonic clock. FCPO variants use the standardized benchmark
// population (P_init = 30 shrinking to 4).
inline RunRecord run_case(const benchmarks::BenchmarkCase& bench_case,
                          const std::string& algorithm, std::uint64_t seed,
                          long long nfe_budget) {
    const Objective f = benchmarks::to_objective(bench_case);
    Budget budget{nfe_budget, 0};
    RngStream rng(seed);

    const auto start = std::chrono::steady_clock::now();
    RunRecord rec;
    if (algorithm == "fcpo" || algorithm == "fcpo_nozoom" ||
        algorithm == "fcpo_noeigen" || algorithm == "fcpo_nolpsr") {
        optimizer::FcpoConfig cfg;
        cfg.p_init = 30;
        cfg.no_zoom = algorithm == "fcpo_nozoom";
        cfg.no_eigen = algorithm == "fcpo_noeigen";
        cfg.no_lpsr = algorithm == "fcpo_nolpsr";
        rec = optimizer::fcpo_run(f, cfg, budget, rng);
    } else if (algorithm == "pso") {
        rec = baselines::pso_run(f, baselines::BaselineConfig{}, budget, rng);
    } else if (algorithm == "shade") {
        rec = baselines::shade_run(f, baselines::BaselineConfig{}, budget, rng);
    } else if (algorithm == "lshade") {
        rec = baselines::lshade_run(f, baselines::BaselineConfig{}, budget, rng);
    } else if (algorithm == "cmaes") {
        rec = baselines::cmaes_run(f, baselines::BaselineConfig{}, budget, rng);
    } else {
        throw std::invalid_argument("run_case: unknown algorithm '" + algorithm + "'");
    }
    const auto end = std::chrono::steady_clock::now();

    rec.function_id = bench_case.function_id;
    rec.dimension = bench_case.dim;
    rec.algorithm_id = algorithm;
    rec.seed = seed;
    rec.runtime_ms =
        std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(end - start)
            .count();
    if (rec.runtime_ms <= 0.0) rec.runtime_ms = 1e-3;  // clock quantum floor
    return rec;
}

namespace detail {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string run_id(const RunRecord& r) {
    return r.function_id + "_d" + std::to_string(r.dimension) + ":" + r.algorithm_id +
           ":" + std::to_string(r.seed);
}

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace detail

// CSV schema: function,dim,algorithm,seed,final_value,nfe,runtime_ms.
inline void write_results_csv(std::ostream& os, const std::vector<RunRecord>& records) {
    os << "function,dim,algorithm,seed,final_value,nfe,runtime_ms\n";
    for (const RunRecord& r : records)
        os << r.function_id << "," << r.dimension << "," << r.algorithm_id << ","
           << r.seed << "," << detail::format_double(r.final_value) << "," << r.nfe
           << "," << detail::format_double(r.runtime_ms) << "\n";
}

// One JSON object per improvement event with keys run_id, nfe, best.
inline void write_traces_jsonl(std::ostream& os, const std::vector<RunRecord>& records) {
    for (const RunRecord& r : records) {
        const std::string id = detail::run_id(r);
        for (const TracePoint& tp : r.trace) {
            nlohmann::json obj;
            obj["run_id"] = id;
            obj["nfe"] = tp.nfe;
            obj["best"] = tp.best;
            os << obj.dump() << "\n";
        }
    }
}

inline std::vector<benchmarks::BenchmarkCase> resolve_cases(const HarnessConfig& cfg) {
    std::vector<benchmarks::BenchmarkCase> all = benchmarks::suite(cfg.master_seed);
    if (cfg.cases.empty()) return all;
    std::vector<benchmarks::BenchmarkCase> selected;
    for (const std::string& wanted : cfg.cases) {
        bool found = false;
        for (const auto& c : all)
            if (c.case_id() == wanted || c.function_id == wanted) {
                selected.push_back(c);
                found = true;
            }
        if (!found)
            throw std::invalid_argument("unknown benchmark case '" + wanted + "'");
    }
    return selected;
}

inline std::string effective_algorithm(const HarnessConfig& cfg, const std::string& algo) {
    if (algo != "fcpo") return algo;
    if (cfg.no_zoom) return "fcpo_nozoom";
    if (cfg.no_eigen) return "fcpo_noeigen";
    if (cfg.no_lpsr) return "fcpo_nolpsr";
    return algo;
}

// Full (case x algorithm x run) cross product. Work items are independent;
// results are merged in (case, algorithm, run) order so the file content does
// not depend on thread scheduling.
inline std::vector<RunRecord> bench_matrix(const HarnessConfig& cfg) {
    const std::vector<benchmarks::BenchmarkCase> cases = resolve_cases(cfg);
    struct Item {
        int case_idx, algo_idx, run_idx;
        std::uint64_t seed;
    };
    std::vector<Item> items;
    long long linear = 0;
    for (int ci = 0; ci < static_cast<int>(cases.size()); ++ci)
        for (int ai = 0; ai < static_cast<int>(cfg.algorithms.size()); ++ai)
            for (int ri = 0; ri < cfg.n_runs; ++ri)
                items.push_back({ci, ai, ri, derive_run_seed(cfg.master_seed, linear++)});

    std::vector<RunRecord> records(items.size());
    auto work = [&](const Item& item) {
        const auto& c = cases[item.case_idx];
        const std::string algo = effective_algorithm(cfg, cfg.algorithms[item.algo_idx]);
        RunRecord rec = run_case(c, algo, item.seed, cfg.budget_for(c.dim));
        return rec;
    };

    if (cfg.parallelism <= 1) {
        for (std::size_t i = 0; i < items.size(); ++i) records[i] = work(items[i]);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= items.size()) break;
                records[i] = work(items[i]);
            }
        };
        std::vector<std::thread> pool;
        for (int t = 0; t < cfg.parallelism; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return records;
}

inline void write_bench_outputs(const HarnessConfig& cfg,
                                const std::vector<RunRecord>& records) {
    std::filesystem::create_directories(cfg.out_dir);
    {
        std::ofstream csv(cfg.out_dir + "/results.csv");
        if (!csv) throw std::runtime_error("cannot write " + cfg.out_dir + "/results.csv");
        write_results_csv(csv, records);
    }
    {
        std::ofstream jsonl(cfg.out_dir + "/traces.jsonl");
        if (!jsonl) throw std::runtime_error("cannot write " + cfg.out_dir + "/traces.jsonl");
        write_traces_jsonl(jsonl, records);
    }
}

// ---------------------------------------------------------------------------
// results parsing and statistics reporting

struct CsvRow {
    std::string function_id;
    int dim = 0;
    std::string algorithm_id;
    std::uint64_t seed = 0;
    double final_value = 0.0;
    long long nfe = 0;
    double runtime_ms = 0.0;

    std::string case_id() const { return function_id + "_d" + std::to_string(dim); }
};

inline std::vector<CsvRow> parse_results_csv(std::istream& is) {
    std::vector<CsvRow> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line_no == 1) {
            if (line != "function,dim,algorithm,seed,final_value,nfe,runtime_ms")
                throw std::runtime_error("results CSV: bad header at line 1");
            continue;
        }
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 7)
            throw std::runtime_error("results CSV: expected 7 fields at line " +
                                     std::to_string(line_no));
        try {
            CsvRow row;
            row.function_id = fields[0];
            row.dim = std::stoi(fields[1]);
            row.algorithm_id = fields[2];
            row.seed = std::stoull(fields[3]);
            row.final_value = std::stod(fields[4]);
            row.nfe = std::stoll(fields[5]);
            row.runtime_ms = std::stod(fields[6]);
            rows.push_back(row);
        } catch (const std::exception&) {
            throw std::runtime_error("results CSV: parse error at line " +
                                     std::to_string(line_no));
        }
    }
    return rows;
}

// Per-case omnibus + post-hoc report, aggregate ranks and Friedman test, plus
// plot-ready exports (NFE convergence, runtime vs relative median error).
inline void stats_report(const std::string& results_csv_path, const std::string& out_dir,
                         const std::string& control = "fcpo") {
    std::ifstream in(results_csv_path);
    if (!in) throw std::runtime_error("cannot open " + results_csv_path);
    const std::vector<CsvRow> rows = parse_results_csv(in);
    if (rows.empty()) throw std::runtime_error("results CSV: no data rows");

    std::map<std::string, std::map<std::string, std::vector<double>>> by_case;
    std::map<std::string, std::map<std::string, std::vector<double>>> runtimes;
    for (const CsvRow& r : rows) {
        by_case[r.case_id()][r.algorithm_id].push_back(r.final_value);
        runtimes[r.case_id()][r.algorithm_id].push_back(r.runtime_ms);
    }

    std::filesystem::create_directories(out_dir);
    std::ofstream report(out_dir + "/report.txt");
    nlohmann::json summary;

    std::set<std::string> algo_set;
    for (const auto& [case_id, groups] : by_case)
        for (const auto& [algo, vals] : groups) algo_set.insert(algo);
    const std::vector<std::string> algos(algo_set.begin(), algo_set.end());

    std::vector<std::string> case_ids;
    std::vector<std::vector<double>> median_matrix;
    for (const auto& [case_id, groups] : by_case) {
        std::vector<stats::SampleGroup> sample_groups;
        for (const auto& [algo, vals] : groups)
            sample_groups.push_back({algo, vals});
        if (sample_groups.size() < 2) continue;

        const stats::TestReport kw = stats::kruskal_wallis(sample_groups);
        report << "== " << case_id << " ==\n";
        report << "kruskal_wallis H=" << kw.statistic << " df=" << kw.df
               << " p=" << kw.p_value << "\n";
        summary[case_id]["kruskal_wallis"] = {{"H", kw.statistic},
                                              {"df", kw.df},
                                              {"p", kw.p_value}};

        std::string ctrl = control;
        if (!groups.count(ctrl)) ctrl = sample_groups.front().label;
        const auto dunn = stats::dunn_holm(sample_groups, ctrl);
        for (const auto& d : dunn) {
            const double delta = stats::cliffs_delta(groups.at(ctrl), groups.at(d.label));
            report << "dunn " << ctrl << " vs " << d.label << ": z=" << d.z
                   << " p_raw=" << d.p_raw << " p_holm=" << d.p_adjusted
                   << " cliffs_delta=" << delta << "\n";
            summary[case_id]["dunn_vs_" + d.label] = {{"z", d.z},
                                                      {"p_raw", d.p_raw},
                                                      {"p_holm", d.p_adjusted},
                                                      {"cliffs_delta", delta}};
        }
        report << "\n";

        // aggregate ranking uses only cases covered by every algorithm
        bool complete = true;
        for (const std::string& a : algos)
            if (!groups.count(a)) complete = false;
        if (complete) {
            case_ids.push_back(case_id);
            std::vector<double> medians;
            for (const std::string& a : algos) medians.push_back(detail::median(groups.at(a)));
            median_matrix.push_back(medians);
        }
    }

    if (median_matrix.size() >= 2 && algos.size() >= 2) {
        const stats::RankTable rt = stats::rank_table(median_matrix);
        const stats::TestReport fr = stats::friedman(rt.per_case_ranks);
        report << "== aggregate ==\n";
        for (std::size_t j = 0; j < algos.size(); ++j) {
            report << "avg_rank " << algos[j] << " = " << rt.average_ranks[j] << "\n";
            summary["aggregate"]["avg_rank"][algos[j]] = rt.average_ranks[j];
        }
        report << "friedman chi2=" << fr.statistic << " df=" << fr.df
               << " p=" << fr.p_value << "\n";
        summary["aggregate"]["friedman"] = {{"chi2", fr.statistic},
                                            {"df", fr.df},
                                            {"p", fr.p_value}};
    }

    // Pareto-style export: mean runtime vs relative median error, the latter
    // normalized by the best algorithm's median error per case.
    {
        std::ofstream pareto(out_dir + "/pareto.csv");
        pareto << "case,algorithm,mean_runtime_ms,median_error,relative_median_error\n";
        for (const auto& [case_id, groups] : by_case) {
            double best_err = std::numeric_limits<double>::infinity();
            std::map<std::string, double> errs;
            const std::string fn = case_id.substr(0, case_id.find("_d"));
            double opt = 0.0;
            try {
                opt = benchmarks::bias_for(fn);
            } catch (const std::exception&) {
                opt = 0.0;  // non-suite function ids: report raw medians
            }
            for (const auto& [algo, vals] : groups) {
                errs[algo] = detail::median(vals) - opt;
                best_err = std::min(best_err, errs[algo]);
            }
            const double denom = std::max(std::abs(best_err), 1e-12);
            for (const auto& [algo, vals] : groups) {
                double mean_rt = 0.0;
                for (double t : runtimes[case_id][algo]) mean_rt += t;
                mean_rt /= static_cast<double>(runtimes[case_id][algo].size());
                pareto << case_id << "," << algo << "," << detail::format_double(mean_rt)
                       << "," << detail::format_double(errs[algo]) << ","
                       << detail::format_double(errs[algo] / denom) << "\n";
            }
        }
    }

    // NFE-convergence export from the traces sidecar, when present.
    {
        const std::string traces_path =
            std::filesystem::path(results_csv_path).parent_path() / "traces.jsonl";
        std::ifstream traces(traces_path);
        if (traces) {
            // run_id -> sorted (nfe, best) steps
            std::map<std::string, std::vector<TracePoint>> runs;
            std::string line;
            while (std::getline(traces, line)) {
                if (line.empty()) continue;
                const nlohmann::json obj = nlohmann::json::parse(line);
                runs[obj["run_id"].get<std::string>()].push_back(
                    {obj["nfe"].get<long long>(), obj["best"].get<double>()});
            }
            // group by case:algorithm (strip the seed suffix)
            std::map<std::string, std::vector<const std::vector<TracePoint>*>> grouped;
            long long max_nfe = 1;
            for (const auto& [id, tps] : runs) {
                const std::size_t cut = id.rfind(':');
                grouped[id.substr(0, cut)].push_back(&tps);
                if (!tps.empty()) max_nfe = std::max(max_nfe, tps.back().nfe);
            }
            std::ofstream conv(out_dir + "/convergence.csv");
            conv << "case,algorithm,nfe,median_best\n";
            std::vector<long long> grid;
            for (int i = 0; i < 32; ++i) {
                const double f = std::pow(static_cast<double>(max_nfe), (i + 1) / 32.0);
                const long long nfe = std::max(1LL, static_cast<long long>(std::llround(f)));
                if (grid.empty() || nfe != grid.back()) grid.push_back(nfe);
            }
            for (const auto& [key, traces_vec] : grouped) {
                const std::size_t cut = key.rfind(':');
                const std::string case_id = key.substr(0, cut);
                const std::string algo = key.substr(cut + 1);
                for (long long nfe : grid) {
                    std::vector<double> bests;
                    for (const auto* tps : traces_vec) {
                        double best = std::numeric_limits<double>::quiet_NaN();
                        for (const TracePoint& tp : *tps) {
                            if (tp.nfe > nfe) break;
                            best = tp.best;
                        }
                        if (!std::isnan(best)) bests.push_back(best);
                    }
                    if (bests.empty()) continue;
                    conv << case_id << "," << algo << "," << nfe << ","
                         << detail::format_double(detail::median(bests)) << "\n";
                }
            }
        }
    }

    std::ofstream js(out_dir + "/summary.json");
    js << summary.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// plain-text matrix persistence (shared pinning format for signals and maps)

inline void write_matrix_text(std::ostream& os, const std::string& name,
                              const std::vector<Vec>& rows) {
    os.precision(17);
    os << name << "\n" << rows.size() << "\n" << (rows.empty() ? 0 : rows[0].size()) << "\n";
    for (const Vec& r : rows) {
        for (std::size_t j = 0; j < r.size(); ++j) os << r[j] << (j + 1 < r.size() ? " " : "\n");
    }
}

inline std::vector<Vec> read_matrix_text(std::istream& is, std::string* name = nullptr) {
    std::string n;
    std::size_t r = 0, c = 0;
    if (!(is >> n >> r >> c)) throw std::runtime_error("matrix text: malformed header");
    if (name) *name = n;
    std::vector<Vec> rows(r, Vec(c));
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j)
            if (!(is >> rows[i][j])) throw std::runtime_error("matrix text: truncated data");
    return rows;
}

// ---------------------------------------------------------------------------
// twin demo

struct TwinConfig {
    std::uint64_t master_seed = 42;
    int n_runs = 10;
    long long nfe_budget = 6000;
    int nx = 40;
    int ny = 40;
    int n_pmj = 3;
    int leads = 12;
    int horizon_ms = 150;
    std::string out_dir = "out";
};

struct TwinOutcome {
    std::vector<RunRecord> records;
    Vec sigma_map;
    double initial_median_loss = 0.0;  // of the first run's LHS population
};

inline void demo_twin(const TwinConfig& cfg) {
    const twin::GridGraph grid = twin::GridGraph::uniform(cfg.nx, cfg.ny);
    const twin::LeadField lf =
        twin::LeadField::random(cfg.leads, grid.nodes(), derive_run_seed(cfg.master_seed, 900001));

    // hidden-truth PMJ configuration
    RngStream truth_rng(derive_run_seed(cfg.master_seed, 900002));
    twin::PmjConfig truth;
    for (int i = 0; i < cfg.n_pmj; ++i)
        truth.sites.push_back({truth_rng.next_double() * (cfg.nx - 1),
                               truth_rng.next_double() * (cfg.ny - 1),
                               truth_rng.next_double() * 20.0});
    const Vec truth_map = twin::activation_map(grid, truth);
    const twin::EcgSignal target = twin::pseudo_ecg(truth_map, lf, cfg.horizon_ms);

    std::filesystem::create_directories(cfg.out_dir);
    {
        std::ofstream os(cfg.out_dir + "/target_ecg.txt");
        write_matrix_text(os, "target_ecg", target.leads);
    }
    {
        std::ofstream os(cfg.out_dir + "/truth_activation.txt");
        write_matrix_text(os, "truth_activation", {truth_map});
    }

    std::vector<RunRecord> records;
    std::vector<Vec> final_maps;
    for (int r = 0; r < cfg.n_runs; ++r) {
        Budget budget{cfg.nfe_budget, 0};
        RngStream rng(derive_run_seed(cfg.master_seed, r));
        optimizer::FcpoConfig opt_cfg;
        auto [best, rec] = twin::calibrate(target, grid, lf, cfg.n_pmj, opt_cfg, budget, rng);
        rec.function_id = "twin";
        rec.seed = derive_run_seed(cfg.master_seed, r);
        records.push_back(rec);
        final_maps.push_back(twin::activation_map(grid, best));
    }

    const Vec sigma = twin::activation_std(final_maps);
    {
        std::ofstream os(cfg.out_dir + "/sigma_map.csv");
        os << "node,x,y,sigma\n";
        os.precision(17);
        for (int k = 0; k < grid.nodes(); ++k)
            os << k << "," << k % grid.nx << "," << k / grid.nx << "," << sigma[k] << "\n";
    }

    // mean +/- sd of best-so-far loss at NFE checkpoints across runs
    {
        std::ofstream os(cfg.out_dir + "/loss_curve.csv");
        os << "nfe,mean_loss,sd_loss\n";
        os.precision(17);
        for (long long nfe = 50; nfe <= cfg.nfe_budget; nfe += 50) {
            std::vector<double> bests;
            for (const RunRecord& rec : records) {
                double best = std::numeric_limits<double>::quiet_NaN();
                for (const TracePoint& tp : rec.trace) {
                    if (tp.nfe > nfe) break;
                    best = tp.best;
                }
                if (!std::isnan(best)) bests.push_back(best);
            }
            if (bests.empty()) continue;
            double mean = 0.0;
            for (double b : bests) mean += b;
            mean /= static_cast<double>(bests.size());
            double sd = 0.0;
            for (double b : bests) sd += (b - mean) * (b - mean);
            sd = bests.size() > 1 ? std::sqrt(sd / static_cast<double>(bests.size() - 1)) : 0.0;
            os << nfe << "," << mean << "," << sd << "\n";
        }
    }
}

}  // namespace fcpo::harness
