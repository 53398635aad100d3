#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "tqmc/engine.hpp"
#include "tqmc/model.hpp"
#include "tqmc/sgrid.hpp"

namespace tqmc {

// Fully resolved run configuration (defaults filled in at parse time).
struct RunConfig {
    ModelSpec model;
    InitialStateKind initial_kind = InitialStateKind::domain_wall;
    std::uint64_t initial_custom_bits = 0;

    double s_min = 0.1;
    double s_max = 10.0;
    std::size_t s_count = 20;
    bool s_log_spacing = true;
    std::size_t s_ref_index = 10;

    LoopSchedule schedule;

    std::uint64_t run_count = 2;
    std::uint64_t master_seed = 42;

    // either the literal "standard" or explicit observable names
    std::vector<std::string> observable_names{"standard"};

    std::string output_path = ".";
    bool dump_per_loop = false;

    SGrid make_grid() const;
    SpinBasisState make_initial_state() const;
    std::vector<ObservableSpec> make_observables() const;
};

// Parse a JSON config text. Unknown keys raise invalid_config_error listing
// them; constraint violations name the offending field.
RunConfig parse_config(const std::string& text);
RunConfig load_config_file(const std::string& path);

// Canonical JSON of the effective (defaults-resolved) configuration; embeds
// into result headers and re-parses to an equal RunConfig.
std::string effective_config_json(const RunConfig& config);

} // namespace tqmc
