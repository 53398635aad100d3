#pragma once
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "tqmc/config.hpp"
#include "tqmc/stats.hpp"

namespace tqmc {

// Aggregated outcome of all replicas of a config. On a population-cap
// failure the completed replicas are still aggregated and the failing
// run/loop recorded.
struct RunOutcome {
    AggregateResult aggregate;
    std::vector<double> s_values;
    std::vector<std::string> observable_names;
    std::size_t n_attempted = 0;
    bool failed = false;
    std::uint64_t failed_run = 0;
    std::uint64_t failed_loop = 0;
    std::string failure_message;

    // run-index-ordered sum of per-loop contributions (dump_per_loop only),
    // layout as RunResult::per_loop_contributions
    std::vector<std::complex<double>> per_loop_sum;
};

// Executes runs.count independent replicas (seeds derived from the master
// seed and the run index); output is identical for identical (config, seed)
// regardless of worker count.
RunOutcome execute_runs(const RunConfig& config, unsigned workers);

// Subcommand bodies; nonzero return marks failure after writing whatever
// partial output exists.
int run_command(const RunConfig& config, unsigned workers);
int oracle_command(const RunConfig& config, double dt, double t_max_override);
int invert_command(const std::string& results_csv, const std::string& observable, double t_min,
                   double t_max, std::size_t t_count, const std::string& out_path);
int analyze_command(const std::string& results_csv, const std::string& observable,
                    const std::string& out_path);

// results.csv rows plus the header-embedded effective config
struct ResultsTable {
    std::vector<double> s;
    std::vector<std::string> observable;
    std::vector<double> value_re, value_im, stderr_re, stderr_im;
    std::vector<std::uint64_t> n_runs;
    std::string config_json;
    bool single_run = false;
    bool failed = false;
};

ResultsTable read_results_csv(const std::string& path);

std::string format_g17(double v); // 17 significant digits, locale-free

} // namespace tqmc
