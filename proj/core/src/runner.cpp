#include "tqmc/runner.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "tqmc/engine.hpp"
#include "tqmc/errors.hpp"
#include "tqmc/laplace_post.hpp"
#include "tqmc/oracle.hpp"
#include "tqmc/rng.hpp"

namespace tqmc {

namespace fs = std::filesystem;

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

RunOutcome execute_runs(const RunConfig& config, unsigned workers) {
    const SGrid grid = config.make_grid();
    const SpinBasisState psi0 = config.make_initial_state();
    const std::vector<ObservableSpec> observables = config.make_observables();

    RunOutcome out;
    out.s_values = grid.values;
    for (const auto& o : observables) out.observable_names.push_back(o.name);
    out.n_attempted = config.run_count;

    const std::uint64_t n = config.run_count;
    std::vector<FinalizedRun> finalized(n);
    std::vector<char> ok(n, 0);
    std::vector<char> hit_cap(n, 0);
    std::vector<std::uint64_t> fail_loop(n, 0);
    std::vector<std::string> fail_msg(n);
    std::vector<std::vector<std::complex<double>>> dumps;
    if (config.dump_per_loop) dumps.resize(n);

    std::atomic<std::uint64_t> next{0};
    const auto worker = [&]() {
        for (;;) {
            const std::uint64_t i = next.fetch_add(1);
            if (i >= n) return;
            RunRng rng(run_seed(config.master_seed, i));
            try {
                RunResult rr =
                    run_simulation(config.model, psi0, grid, config.schedule, observables, rng);
                if (config.dump_per_loop) dumps[i] = rr.per_loop_contributions;
                finalized[i] = finalize_run(rr);
                ok[i] = 1;
            } catch (const resource_limit_error& e) {
                hit_cap[i] = 1;
                fail_loop[i] = e.loop_index;
                fail_msg[i] = e.what();
            } catch (const std::exception& e) {
                hit_cap[i] = 1;
                fail_loop[i] = 0;
                fail_msg[i] = e.what();
            }
        }
    };

    unsigned n_workers = workers == 0 ? 1u : workers;
    n_workers = static_cast<unsigned>(
        std::min<std::uint64_t>(n_workers, std::max<std::uint64_t>(n, 1)));
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (unsigned t = 0; t < n_workers; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    for (std::uint64_t i = 0; i < n; ++i)
        if (hit_cap[i]) {
            out.failed = true;
            out.failed_run = i;
            out.failed_loop = fail_loop[i];
            out.failure_message = fail_msg[i];
            break;
        }

    std::vector<FinalizedRun> good;
    good.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i)
        if (ok[i]) good.push_back(std::move(finalized[i]));

    if (good.empty()) return out;
    if (good.size() == 1) {
        // single replica: means only, stderr pinned to zero
        out.aggregate.n_runs = 1;
        out.aggregate.mean = good[0].values;
        out.aggregate.stderr_.assign(good[0].values.size(),
                                     std::vector<std::complex<double>>(grid.size(), 0.0));
        out.aggregate.population_mean.assign(good[0].population_trace.begin(),
                                             good[0].population_trace.end());
        out.aggregate.population_stderr.assign(good[0].population_trace.size(), 0.0);
    } else {
        out.aggregate = aggregate(good);
    }

    if (config.dump_per_loop) {
        for (std::uint64_t i = 0; i < n; ++i) {
            if (!ok[i]) continue;
            if (out.per_loop_sum.empty()) out.per_loop_sum.assign(dumps[i].size(), 0.0);
            for (std::size_t k = 0; k < dumps[i].size(); ++k) out.per_loop_sum[k] += dumps[i][k];
        }
    }
    return out;
}

namespace {

void write_results_csv(const fs::path& path, const RunConfig& config, const RunOutcome& out) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw invalid_input_error("cannot write " + path.string());
    const bool single = out.aggregate.n_runs == 1;
    f << "# tqmc results\n";
    f << "# config: " << effective_config_json(config) << "\n";
    f << "# single_run: " << (single ? 1 : 0) << "\n";
    if (out.failed)
        f << "# failed: run=" << out.failed_run << " loop=" << out.failed_loop
          << " message=" << out.failure_message << "\n";
    f << "s,observable,value_re,value_im,stderr_re,stderr_im,n_runs";
    if (out.failed) f << ",failed";
    f << "\n";
    for (std::size_t k = 0; k < out.s_values.size(); ++k) {
        for (std::size_t o = 0; o < out.observable_names.size(); ++o) {
            const auto& mean =
                out.aggregate.mean.empty() ? std::complex<double>(0.0) : out.aggregate.mean[o][k];
            const auto& err = out.aggregate.stderr_.empty() ? std::complex<double>(0.0)
                                                            : out.aggregate.stderr_[o][k];
            f << format_g17(out.s_values[k]) << ',' << out.observable_names[o] << ','
              << format_g17(mean.real()) << ',' << format_g17(mean.imag()) << ','
              << format_g17(err.real()) << ',' << format_g17(err.imag()) << ','
              << out.aggregate.n_runs;
            if (out.failed) f << ",1";
            f << "\n";
        }
    }
}

void write_population_csv(const fs::path& path, const RunConfig& config, const RunOutcome& out) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw invalid_input_error("cannot write " + path.string());
    f << "# tqmc population\n";
    f << "# config: " << effective_config_json(config) << "\n";
    f << "loop_m,mean_attempts,stderr_attempts\n";
    for (std::size_t m = 0; m < out.aggregate.population_mean.size(); ++m)
        f << (m + 1) << ',' << format_g17(out.aggregate.population_mean[m]) << ','
          << format_g17(out.aggregate.population_stderr[m]) << "\n";
}

void write_per_loop_csv(const fs::path& path, const RunConfig& config, const RunOutcome& out) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw invalid_input_error("cannot write " + path.string());
    f << "# tqmc per-loop contributions (mean over runs)\n";
    f << "# config: " << effective_config_json(config) << "\n";
    f << "loop_m,s,observable,value_re,value_im\n";
    if (out.per_loop_sum.empty() || out.aggregate.n_runs == 0) return;
    const std::size_t ns = out.s_values.size();
    const std::size_t n_obs = out.observable_names.size();
    const double inv = 1.0 / static_cast<double>(out.aggregate.n_runs);
    const std::size_t m_total = out.per_loop_sum.size() / (ns * n_obs);
    for (std::size_t m = 0; m < m_total; ++m)
        for (std::size_t o = 0; o < n_obs; ++o)
            for (std::size_t k = 0; k < ns; ++k) {
                const auto v = out.per_loop_sum[m * n_obs * ns + o * ns + k] * inv;
                f << (m + 1) << ',' << format_g17(out.s_values[k]) << ','
                  << out.observable_names[o] << ',' << format_g17(v.real()) << ','
                  << format_g17(v.imag()) << "\n";
            }
}

} // namespace

int run_command(const RunConfig& config, unsigned workers) {
    const RunOutcome out = execute_runs(config, workers);
    const fs::path dir(config.output_path);
    fs::create_directories(dir);
    write_results_csv(dir / "results.csv", config, out);
    write_population_csv(dir / "population.csv", config, out);
    if (config.dump_per_loop) write_per_loop_csv(dir / "per_loop.csv", config, out);
    if (out.failed) {
        std::cerr << "run failed: replica " << out.failed_run << " at loop " << out.failed_loop
                  << ": " << out.failure_message << "\n";
        return 2;
    }
    return 0;
}

int oracle_command(const RunConfig& config, double dt, double t_max_override) {
    const SGrid grid = config.make_grid();
    const SpinBasisState psi0 = config.make_initial_state();
    const std::vector<ObservableSpec> observables = config.make_observables();

    RunOutcome out;
    out.s_values = grid.values;
    for (const auto& o : observables) out.observable_names.push_back(o.name);
    out.n_attempted = 1;
    out.aggregate.n_runs = 1;
    out.aggregate.mean.assign(observables.size(),
                              std::vector<std::complex<double>>(grid.size(), 0.0));
    out.aggregate.stderr_.assign(observables.size(),
                                 std::vector<std::complex<double>>(grid.size(), 0.0));

    if (config.model.L <= 8) {
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const DenseMatrix rho = dense_resolvent(config.model, psi0, grid.values[k]);
            for (std::size_t o = 0; o < observables.size(); ++o)
                out.aggregate.mean[o][k] = trace_with(observables[o], rho);
        }
    } else {
        const double s_min = grid.values.front();
        const double t_max = t_max_override > 0.0 ? t_max_override : 50.0 / s_min;
        const auto series = time_domain_reference(config.model, psi0, observables, t_max, dt);
        bool warned = false;
        for (std::size_t o = 0; o < observables.size(); ++o)
            for (std::size_t k = 0; k < grid.size(); ++k) {
                const QuadratureResult q = laplace_quadrature(series[o], grid.values[k]);
                out.aggregate.mean[o][k] = q.value;
                if (q.tail_warning && !warned) {
                    std::cerr << "oracle: Laplace tail bound " << q.tail_bound
                              << " above tolerance at s = " << grid.values[k]
                              << "; increase t_max\n";
                    warned = true;
                }
            }
    }

    const fs::path dir(config.output_path);
    fs::create_directories(dir);
    write_results_csv(dir / "results.csv", config, out);
    return 0;
}

ResultsTable read_results_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw invalid_input_error("cannot open results file: " + path);
    ResultsTable table;
    std::string line;
    bool saw_header = false;
    bool has_failed_col = false;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const std::string config_tag = "# config: ";
            const std::string single_tag = "# single_run: ";
            if (line.rfind(config_tag, 0) == 0) table.config_json = line.substr(config_tag.size());
            if (line.rfind(single_tag, 0) == 0) table.single_run = line.substr(single_tag.size()) == "1";
            if (line.rfind("# failed:", 0) == 0) table.failed = true;
            continue;
        }
        if (!saw_header) {
            if (line.rfind("s,observable,", 0) != 0)
                throw invalid_input_error("unrecognized results header: " + line);
            has_failed_col = line.find(",failed") != std::string::npos;
            saw_header = true;
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        const std::size_t expect = has_failed_col ? 8 : 7;
        if (cells.size() != expect)
            throw invalid_input_error("bad results row (wrong column count): " + line);
        table.s.push_back(std::stod(cells[0]));
        table.observable.push_back(cells[1]);
        table.value_re.push_back(std::stod(cells[2]));
        table.value_im.push_back(std::stod(cells[3]));
        table.stderr_re.push_back(std::stod(cells[4]));
        table.stderr_im.push_back(std::stod(cells[5]));
        table.n_runs.push_back(std::stoull(cells[6]));
    }
    if (!saw_header) throw invalid_input_error("results file has no data header: " + path);
    return table;
}

namespace {

// rows of one observable, s ascending
void select_observable(const ResultsTable& table, const std::string& name,
                       std::vector<double>& s, std::vector<double>& c) {
    for (std::size_t i = 0; i < table.s.size(); ++i)
        if (table.observable[i] == name) {
            s.push_back(table.s[i]);
            c.push_back(table.value_re[i]);
        }
    if (s.empty())
        throw invalid_input_error("observable \"" + name + "\" not present in the results file");
}

} // namespace

int invert_command(const std::string& results_csv, const std::string& observable, double t_min,
                   double t_max, std::size_t t_count, const std::string& out_path) try {
    if (!(t_min > 0.0) || !(t_max >= t_min) || t_count == 0)
        throw invalid_input_error("invert: need 0 < t_min <= t_max and t_count >= 1");
    const ResultsTable table = read_results_csv(results_csv);
    std::vector<double> s, c;
    select_observable(table, observable, s, c);
    const RationalModel model = rational_fit(s, c);

    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path, std::ios::trunc);
        if (!file) throw invalid_input_error("cannot write " + out_path);
        os = &file;
    }
    *os << "# tqmc inversion: observable=" << observable << " fit_order=(" << model.order_p
        << "," << model.order_q << ") residual=" << format_g17(model.residual) << "\n";
    *os << "t,value\n";
    const auto f = [&](std::complex<double> z) { return model.evaluate(z); };
    for (std::size_t i = 0; i < t_count; ++i) {
        const double t =
            t_count == 1
                ? t_min
                : t_min + (t_max - t_min) * static_cast<double>(i) /
                      static_cast<double>(t_count - 1);
        *os << format_g17(t) << ',' << format_g17(zakian_invert(f, t)) << "\n";
    }
    return 0;
} catch (const std::exception& e) {
    std::cerr << "invert failed: " << e.what() << "\n";
    return 1;
}

int analyze_command(const std::string& results_csv, const std::string& observable,
                    const std::string& out_path) try {
    const ResultsTable table = read_results_csv(results_csv);
    std::vector<double> s, c;
    select_observable(table, observable, s, c);

    nlohmann::json report;
    report["observable"] = observable;

    const RationalModel model = rational_fit(s, c);
    report["fit"] = {{"order_p", model.order_p}, {"order_q", model.order_q},
                     {"residual", model.residual}, {"s_scale", model.s_scale},
                     {"num", model.num},           {"den", model.den}};

    const LogDerivativePeak peak = log_derivative_peak(s, c);
    if (peak.s_star) {
        report["frequency"] = *peak.s_star;
        report["peak_value"] = peak.peak_value;
    } else {
        report["frequency"] = nullptr;
        report["peak_value"] = nullptr;
    }

    try {
        report["amplitude"] = amplitude_estimate(s, c, model);
    } catch (const undefined_limit_error& e) {
        report["amplitude"] = nullptr;
        report["amplitude_error"] = e.what();
    }

    const std::string text = report.dump(2);
    if (out_path.empty()) {
        std::cout << text << "\n";
    } else {
        std::ofstream file(out_path, std::ios::trunc);
        if (!file) throw invalid_input_error("cannot write " + out_path);
        file << text << "\n";
    }
    return 0;
} catch (const std::exception& e) {
    std::cerr << "analyze failed: " << e.what() << "\n";
    return 1;
}

} // namespace tqmc
