#include "tqmc/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tqmc/errors.hpp"
#include "tqmc/observable.hpp"

namespace tqmc {

using json = nlohmann::json;

namespace {

void reject_unknown_keys(const json& obj, const std::string& where,
                         const std::set<std::string>& allowed) {
    std::string unknown;
    for (const auto& item : obj.items())
        if (!allowed.count(item.key())) {
            if (!unknown.empty()) unknown += ", ";
            unknown += where + "." + item.key();
        }
    if (!unknown.empty())
        throw invalid_config_error("unknown config keys: " + unknown);
}

double get_number(const json& obj, const std::string& where, const std::string& key,
                  double fallback, bool required = false) {
    if (!obj.contains(key)) {
        if (required) throw invalid_config_error(where + "." + key + " is required");
        return fallback;
    }
    const json& v = obj.at(key);
    if (!v.is_number())
        throw invalid_config_error(where + "." + key + " must be a number");
    return v.get<double>();
}

std::uint64_t get_uint(const json& obj, const std::string& where, const std::string& key,
                       std::uint64_t fallback, bool required = false) {
    if (!obj.contains(key)) {
        if (required) throw invalid_config_error(where + "." + key + " is required");
        return fallback;
    }
    const json& v = obj.at(key);
    if (!v.is_number_integer() || (v.is_number_integer() && v.get<double>() < 0))
        throw invalid_config_error(where + "." + key + " must be a nonnegative integer");
    return v.get<std::uint64_t>();
}

} // namespace

SGrid RunConfig::make_grid() const {
    return make_sgrid_spaced(s_min, s_max, s_count, s_log_spacing, s_ref_index);
}

SpinBasisState RunConfig::make_initial_state() const {
    return initial_state(model, initial_kind, initial_custom_bits);
}

std::vector<ObservableSpec> RunConfig::make_observables() const {
    const SpinBasisState psi0 = make_initial_state();
    if (observable_names.size() == 1 && observable_names[0] == "standard")
        return standard_observable_suite(model, psi0);
    std::vector<ObservableSpec> out;
    out.reserve(observable_names.size());
    for (const auto& name : observable_names) out.push_back(observable_by_name(model, psi0, name));
    return out;
}

RunConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw invalid_config_error(std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw invalid_config_error("config root must be an object");
    reject_unknown_keys(root, "config",
                        {"model", "initial_state", "s_grid", "schedule", "runs", "observables",
                         "output_path", "dump_per_loop"});

    RunConfig cfg;

    if (!root.contains("model")) throw invalid_config_error("config.model is required");
    {
        const json& m = root.at("model");
        if (!m.is_object()) throw invalid_config_error("config.model must be an object");
        const std::string kind = m.value("kind", std::string());
        const auto l = static_cast<int>(get_uint(m, "model", "L", 0, true));
        if (kind == "xxz") {
            reject_unknown_keys(m, "model", {"kind", "L", "J_xy", "J_z"});
            cfg.model = make_xxz(l, get_number(m, "model", "J_xy", 0.0, true),
                                 get_number(m, "model", "J_z", 0.0, true));
        } else if (kind == "ising") {
            reject_unknown_keys(m, "model", {"kind", "L", "J", "h_x", "h_z"});
            cfg.model = make_ising(l, get_number(m, "model", "J", 0.0, true),
                                   get_number(m, "model", "h_x", 0.0, true),
                                   get_number(m, "model", "h_z", 0.0, true));
        } else {
            throw invalid_config_error("model.kind must be \"xxz\" or \"ising\"");
        }
    }

    if (root.contains("initial_state")) {
        const json& st = root.at("initial_state");
        if (!st.is_object()) throw invalid_config_error("config.initial_state must be an object");
        reject_unknown_keys(st, "initial_state", {"kind", "state"});
        const std::string kind = st.value("kind", std::string("domain_wall"));
        if (kind == "domain_wall") cfg.initial_kind = InitialStateKind::domain_wall;
        else if (kind == "all_up") cfg.initial_kind = InitialStateKind::all_up;
        else if (kind == "custom") {
            cfg.initial_kind = InitialStateKind::custom;
            if (!st.contains("state") || !st.at("state").is_string())
                throw invalid_config_error("initial_state.state (spin string) is required for "
                                           "kind \"custom\"");
            const SpinBasisState parsed = parse_state(st.at("state").get<std::string>());
            if (parsed.L != cfg.model.L)
                throw invalid_config_error("initial_state.state length does not match model.L");
            cfg.initial_custom_bits = parsed.bits;
        } else {
            throw invalid_config_error("initial_state.kind must be domain_wall, all_up or "
                                       "custom");
        }
    }

    if (root.contains("s_grid")) {
        const json& g = root.at("s_grid");
        if (!g.is_object()) throw invalid_config_error("config.s_grid must be an object");
        reject_unknown_keys(g, "s_grid", {"min", "max", "count", "spacing", "ref"});
        cfg.s_min = get_number(g, "s_grid", "min", cfg.s_min);
        cfg.s_max = get_number(g, "s_grid", "max", cfg.s_max);
        cfg.s_count = static_cast<std::size_t>(get_uint(g, "s_grid", "count", cfg.s_count));
        const std::string spacing = g.value("spacing", std::string("log"));
        if (spacing == "log") cfg.s_log_spacing = true;
        else if (spacing == "linear") cfg.s_log_spacing = false;
        else throw invalid_config_error("s_grid.spacing must be \"log\" or \"linear\"");
        cfg.s_ref_index = cfg.s_count / 2;
        if (g.contains("ref")) {
            const json& ref = g.at("ref");
            if (ref.is_number_integer()) {
                cfg.s_ref_index = ref.get<std::size_t>();
            } else if (ref.is_object()) {
                reject_unknown_keys(ref, "s_grid.ref", {"index", "value"});
                if (ref.contains("index") == ref.contains("value"))
                    throw invalid_config_error("s_grid.ref needs exactly one of index, value");
                if (ref.contains("index")) {
                    cfg.s_ref_index = get_uint(ref, "s_grid.ref", "index", 0, true);
                } else {
                    const double v = get_number(ref, "s_grid.ref", "value", 0.0, true);
                    // snap to the nearest grid point
                    const SGrid probe =
                        make_sgrid_spaced(cfg.s_min, cfg.s_max, cfg.s_count, cfg.s_log_spacing, 0);
                    std::size_t best = 0;
                    for (std::size_t k = 1; k < probe.size(); ++k)
                        if (std::abs(probe.values[k] - v) <
                            std::abs(probe.values[best] - v))
                            best = k;
                    cfg.s_ref_index = best;
                }
            } else {
                throw invalid_config_error("s_grid.ref must be an index or {index|value}");
            }
        }
    } else {
        cfg.s_ref_index = cfg.s_count / 2;
    }

    if (!root.contains("schedule")) throw invalid_config_error("config.schedule is required");
    {
        const json& sch = root.at("schedule");
        if (!sch.is_object()) throw invalid_config_error("config.schedule must be an object");
        reject_unknown_keys(sch, "schedule",
                            {"r", "M_trunc", "kappa", "w_u", "u_dw", "dw_enable",
                             "target_population"});
        cfg.schedule.r = get_number(sch, "schedule", "r", 0.0, true);
        cfg.schedule.m_trunc = get_uint(sch, "schedule", "M_trunc", 0, true);
        cfg.schedule.kappa = get_number(sch, "schedule", "kappa", 0.0);
        cfg.schedule.w_u = get_number(sch, "schedule", "w_u", 1e-3);
        cfg.schedule.u_dw = get_number(sch, "schedule", "u_dw", 0.0);
        if (sch.contains("target_population"))
            cfg.schedule.target_population = get_uint(sch, "schedule", "target_population", 0);
        if (sch.contains("dw_enable")) {
            const json& dw = sch.at("dw_enable");
            if (!dw.is_object())
                throw invalid_config_error("schedule.dw_enable must be {loop: m} or "
                                           "{paper_units: x}");
            reject_unknown_keys(dw, "schedule.dw_enable", {"loop", "paper_units"});
            if (dw.contains("loop") == dw.contains("paper_units"))
                throw invalid_config_error("schedule.dw_enable needs exactly one of loop, "
                                           "paper_units");
            if (dw.contains("loop")) {
                cfg.schedule.dw_enable_loop = get_uint(dw, "schedule.dw_enable", "loop", 0, true);
            } else {
                const double x = get_number(dw, "schedule.dw_enable", "paper_units", 0.0, true);
                if (x < 0.0)
                    throw invalid_config_error("schedule.dw_enable.paper_units must be >= 0");
                cfg.schedule.dw_enable_loop =
                    static_cast<std::uint64_t>(std::llround(x * cfg.schedule.r));
            }
        }
    }

    if (!root.contains("runs")) throw invalid_config_error("config.runs is required");
    {
        const json& rn = root.at("runs");
        if (!rn.is_object()) throw invalid_config_error("config.runs must be an object");
        reject_unknown_keys(rn, "runs", {"count", "master_seed", "population_cap"});
        cfg.run_count = get_uint(rn, "runs", "count", 0, true);
        if (cfg.run_count == 0) throw invalid_config_error("runs.count must be >= 1");
        cfg.master_seed = get_uint(rn, "runs", "master_seed", cfg.master_seed);
        cfg.schedule.population_cap =
            get_uint(rn, "runs", "population_cap", cfg.schedule.population_cap);
    }

    if (root.contains("observables")) {
        const json& ob = root.at("observables");
        if (!ob.is_array() || ob.empty())
            throw invalid_config_error("config.observables must be a nonempty array of names");
        cfg.observable_names.clear();
        for (const auto& v : ob) {
            if (!v.is_string())
                throw invalid_config_error("config.observables entries must be strings");
            cfg.observable_names.push_back(v.get<std::string>());
        }
    }

    if (root.contains("output_path")) {
        if (!root.at("output_path").is_string())
            throw invalid_config_error("config.output_path must be a string");
        cfg.output_path = root.at("output_path").get<std::string>();
    }
    if (root.contains("dump_per_loop")) {
        if (!root.at("dump_per_loop").is_boolean())
            throw invalid_config_error("config.dump_per_loop must be a boolean");
        cfg.dump_per_loop = root.at("dump_per_loop").get<bool>();
    }

    // cross-field validation with field-named errors
    cfg.schedule.validate();
    cfg.make_grid();
    try {
        cfg.make_initial_state();
    } catch (const std::exception& e) {
        throw invalid_config_error(std::string("initial_state: ") + e.what());
    }
    try {
        cfg.make_observables();
    } catch (const std::exception& e) {
        throw invalid_config_error(std::string("observables: ") + e.what());
    }
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw invalid_input_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string effective_config_json(const RunConfig& config) {
    json root;
    json m;
    if (config.model.kind == ModelKind::XXZ) {
        m["kind"] = "xxz";
        m["L"] = config.model.L;
        m["J_xy"] = config.model.J_xy;
        m["J_z"] = config.model.J_z;
    } else {
        m["kind"] = "ising";
        m["L"] = config.model.L;
        m["J"] = config.model.J;
        m["h_x"] = config.model.h_x;
        m["h_z"] = config.model.h_z;
    }
    root["model"] = m;

    json st;
    switch (config.initial_kind) {
        case InitialStateKind::domain_wall: st["kind"] = "domain_wall"; break;
        case InitialStateKind::all_up: st["kind"] = "all_up"; break;
        case InitialStateKind::custom:
            st["kind"] = "custom";
            st["state"] = to_string(make_state(config.initial_custom_bits, config.model.L));
            break;
    }
    root["initial_state"] = st;

    root["s_grid"] = {{"min", config.s_min},
                      {"max", config.s_max},
                      {"count", config.s_count},
                      {"spacing", config.s_log_spacing ? "log" : "linear"},
                      {"ref", config.s_ref_index}};

    json sch = {{"r", config.schedule.r},
                {"M_trunc", config.schedule.m_trunc},
                {"kappa", config.schedule.kappa},
                {"w_u", config.schedule.w_u},
                {"u_dw", config.schedule.u_dw},
                {"dw_enable", {{"loop", config.schedule.dw_enable_loop}}}};
    if (config.schedule.target_population)
        sch["target_population"] = *config.schedule.target_population;
    root["schedule"] = sch;

    root["runs"] = {{"count", config.run_count},
                    {"master_seed", config.master_seed},
                    {"population_cap", config.schedule.population_cap}};
    root["observables"] = config.observable_names;
    root["output_path"] = config.output_path;
    root["dump_per_loop"] = config.dump_per_loop;
    return root.dump();
}

} // namespace tqmc
