#pragma once
#include <stdexcept>
#include <string>
#include <cstdint>

namespace tqmc {

// Bad user-supplied value (state length mismatch, odd-L domain wall, ...).
struct invalid_input_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Bad configuration (unknown keys, constraint violations, w_u <= 0, ...).
struct invalid_config_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// An operation was called outside its contract (e.g. deactivate on a
// triplet at or above the threshold).
struct contract_violation : std::logic_error {
    using std::logic_error::logic_error;
};

// Hard resource limits: population cap, dense oracle dimension.
struct resource_limit_error : std::runtime_error {
    resource_limit_error(const std::string& msg, std::uint64_t loop = 0, std::uint64_t run = 0)
        : std::runtime_error(msg), loop_index(loop), run_index(run) {}
    std::uint64_t loop_index;
    std::uint64_t run_index;
};

// Requested accuracy cannot be met (time step too coarse, ...).
struct accuracy_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Rational fit could not produce a stable model at the starting order.
struct fit_failure_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Asymptotic limit requested from a model that does not have one.
struct undefined_limit_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace tqmc
