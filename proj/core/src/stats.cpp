#include "tqmc/stats.hpp"

#include <cmath>

#include "tqmc/engine.hpp"
#include "tqmc/errors.hpp"

namespace tqmc {

FinalizedRun finalize_run(const RunResult& result) {
    FinalizedRun out;
    out.values.assign(result.n_observables,
                      std::vector<std::complex<double>>(result.n_s, 0.0));
    for (std::uint64_t m = 1; m <= result.m_trunc; ++m)
        for (std::size_t o = 0; o < result.n_observables; ++o)
            for (std::size_t k = 0; k < result.n_s; ++k)
                out.values[o][k] += result.contribution(m, o, k);
    out.population_trace = result.population_trace;
    return out;
}

AggregateResult aggregate(const std::vector<FinalizedRun>& runs) {
    const std::size_t n = runs.size();
    if (n < 2) throw invalid_input_error("aggregate: need at least 2 runs for error bars");
    const std::size_t n_obs = runs[0].values.size();
    const std::size_t n_s = n_obs ? runs[0].values[0].size() : 0;
    const std::size_t n_loops = runs[0].population_trace.size();
    for (const auto& r : runs)
        if (r.values.size() != n_obs || (n_obs && r.values[0].size() != n_s) ||
            r.population_trace.size() != n_loops)
            throw invalid_input_error("aggregate: runs have mismatched shapes");

    AggregateResult agg;
    agg.n_runs = n;
    agg.mean.assign(n_obs, std::vector<std::complex<double>>(n_s, 0.0));
    agg.stderr_.assign(n_obs, std::vector<std::complex<double>>(n_s, 0.0));
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t o = 0; o < n_obs; ++o) {
        for (std::size_t k = 0; k < n_s; ++k) {
            std::complex<double> sum = 0.0;
            for (const auto& r : runs) sum += r.values[o][k];
            const std::complex<double> mean = sum * inv_n;
            double var_re = 0.0, var_im = 0.0;
            for (const auto& r : runs) {
                const auto d = r.values[o][k] - mean;
                var_re += d.real() * d.real();
                var_im += d.imag() * d.imag();
            }
            const double denom = static_cast<double>(n - 1) * static_cast<double>(n);
            agg.mean[o][k] = mean;
            agg.stderr_[o][k] = {std::sqrt(var_re / denom), std::sqrt(var_im / denom)};
        }
    }

    agg.population_mean.assign(n_loops, 0.0);
    agg.population_stderr.assign(n_loops, 0.0);
    for (std::size_t m = 0; m < n_loops; ++m) {
        double sum = 0.0;
        for (const auto& r : runs) sum += static_cast<double>(r.population_trace[m]);
        const double mean = sum * inv_n;
        double var = 0.0;
        for (const auto& r : runs) {
            const double d = static_cast<double>(r.population_trace[m]) - mean;
            var += d * d;
        }
        agg.population_mean[m] = mean;
        agg.population_stderr[m] =
            std::sqrt(var / (static_cast<double>(n - 1) * static_cast<double>(n)));
    }
    return agg;
}

} // namespace tqmc
