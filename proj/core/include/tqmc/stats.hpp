#pragma once
#include <complex>
#include <cstdint>
#include <vector>

namespace tqmc {

struct RunResult;

// Per-run finalized values: loop contributions summed over m, indexed
// [observable][s_point]. The population trace is carried along for the
// population CSV.
struct FinalizedRun {
    std::vector<std::vector<std::complex<double>>> values;
    std::vector<std::uint64_t> population_trace;
};

FinalizedRun finalize_run(const RunResult& result);

// Replica statistics over independent runs. stderr_ holds the standard
// error of the mean separately for the real part (.real()) and the
// imaginary part (.imag()) of each value.
struct AggregateResult {
    std::vector<std::vector<std::complex<double>>> mean;
    std::vector<std::vector<std::complex<double>>> stderr_;
    std::size_t n_runs = 0;
    std::vector<double> population_mean;
    std::vector<double> population_stderr;
};

// Requires at least two runs; single-run outputs are handled by the caller
// (explicit single-run flag, zero stderr).
AggregateResult aggregate(const std::vector<FinalizedRun>& runs);

} // namespace tqmc
