#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "tqmc/config.hpp"
#include "tqmc/errors.hpp"
#include "tqmc/runner.hpp"

namespace {

unsigned default_workers() {
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : hc;
}

// TQMC_SEED and TQMC_WORKERS override the config / flag values, useful for
// rerunning a deployed config without editing it
bool env_u64(const char* name, std::uint64_t& out) {
    const char* v = std::getenv(name);
    if (!v || !*v) return false;
    char* end = nullptr;
    const unsigned long long parsed = std::strtoull(v, &end, 10);
    if (end == v || *end != '\0') {
        std::cerr << "ignoring malformed " << name << "=" << v << "\n";
        return false;
    }
    out = parsed;
    return true;
}

// "min:max:count" for the inversion time grid
bool parse_t_grid(const std::string& spec, double& t_min, double& t_max, std::size_t& t_count) {
    std::size_t a = spec.find(':');
    if (a == std::string::npos) return false;
    std::size_t b = spec.find(':', a + 1);
    if (b == std::string::npos) return false;
    try {
        t_min = std::stod(spec.substr(0, a));
        t_max = std::stod(spec.substr(a + 1, b - a - 1));
        t_count = std::stoul(spec.substr(b + 1));
    } catch (const std::exception&) {
        return false;
    }
    return t_min > 0.0 && t_max > t_min && t_count >= 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Laplace-domain quantum spin chain simulator"};
    app.require_subcommand(1);

    std::string config_path;
    unsigned workers = default_workers();
    auto* run = app.add_subcommand("run", "Monte Carlo runs from a JSON config");
    run->add_option("config", config_path, "config file")->required()->check(CLI::ExistingFile);
    run->add_option("--workers", workers, "concurrent replicas (default: hardware threads)");

    std::string oracle_config_path;
    double oracle_dt = 0.0;   // 0 = pick from the model
    double oracle_tmax = 0.0; // 0 = default 50 / s_min
    auto* oracle = app.add_subcommand("oracle", "exact reference values for the same config");
    oracle->add_option("config", oracle_config_path, "config file")
        ->required()
        ->check(CLI::ExistingFile);
    oracle->add_option("--dt", oracle_dt, "time step for the large-L propagator");
    oracle->add_option("--t-max", oracle_tmax, "integration horizon for the large-L propagator");

    std::string invert_csv, invert_obs, invert_grid = "0.5:50:200", invert_out = "inverted.csv";
    auto* invert = app.add_subcommand("invert", "fit results and invert to the time domain");
    invert->add_option("results", invert_csv, "results.csv from run/oracle")
        ->required()
        ->check(CLI::ExistingFile);
    invert->add_option("--observable", invert_obs, "observable name to invert")->required();
    invert->add_option("--t-grid", invert_grid, "time grid as min:max:count");
    invert->add_option("-o,--output", invert_out, "output CSV path");

    std::string analyze_csv, analyze_obs, analyze_out = "analysis.json";
    auto* analyze = app.add_subcommand("analyze", "fit, peak frequency and amplitude report");
    analyze->add_option("results", analyze_csv, "results.csv from run/oracle")
        ->required()
        ->check(CLI::ExistingFile);
    analyze->add_option("--observable", analyze_obs, "observable name to analyze")->required();
    analyze->add_option("-o,--output", analyze_out, "output JSON path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            tqmc::RunConfig config = tqmc::load_config_file(config_path);
            std::uint64_t seed = 0;
            if (env_u64("TQMC_SEED", seed)) config.master_seed = seed;
            std::uint64_t w = 0;
            if (env_u64("TQMC_WORKERS", w) && w > 0)
                workers = static_cast<unsigned>(w);
            return tqmc::run_command(config, workers == 0 ? 1 : workers);
        }
        if (oracle->parsed()) {
            tqmc::RunConfig config = tqmc::load_config_file(oracle_config_path);
            return tqmc::oracle_command(config, oracle_dt, oracle_tmax);
        }
        if (invert->parsed()) {
            double t_min = 0, t_max = 0;
            std::size_t t_count = 0;
            if (!parse_t_grid(invert_grid, t_min, t_max, t_count)) {
                std::cerr << "bad --t-grid, expected min:max:count with 0 < min < max\n";
                return 1;
            }
            return tqmc::invert_command(invert_csv, invert_obs, t_min, t_max, t_count, invert_out);
        }
        if (analyze->parsed())
            return tqmc::analyze_command(analyze_csv, analyze_obs, analyze_out);
    } catch (const tqmc::invalid_config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
