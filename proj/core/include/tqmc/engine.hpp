#pragma once
#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "tqmc/basis.hpp"
#include "tqmc/ensemble.hpp"
#include "tqmc/model.hpp"
#include "tqmc/observable.hpp"
#include "tqmc/rng.hpp"
#include "tqmc/sgrid.hpp"

namespace tqmc {

struct LoopSchedule {
    double r = 30.0;
    std::uint64_t m_trunc = 1;
    double kappa = 0.0;
    double w_u = 1e-3;
    double u_dw = 0.0; // 0 disables the deadweight approximation
    std::uint64_t dw_enable_loop = 0;
    std::uint64_t population_cap = 10'000'000;
    std::optional<std::uint64_t> target_population; // diagnostic only

    void validate() const;
};

struct RunResult {
    // flat layout: [(m-1) * n_observables * n_s + obs * n_s + s]
    std::vector<std::complex<double>> per_loop_contributions;
    std::size_t n_observables = 0;
    std::size_t n_s = 0;
    std::uint64_t m_trunc = 0;
    std::vector<std::uint64_t> population_trace; // spawning attempts per loop
    std::uint64_t cancellations = 0;
    std::uint64_t kills = 0;

    std::complex<double> contribution(std::uint64_t m, std::size_t obs, std::size_t s) const {
        return per_loop_contributions[(m - 1) * n_observables * n_s + obs * n_s + s];
    }
};

enum class FreeUpdateMode { initial, loop };

// Single diagonal triplet (1, psi0, psi0), reweight identically 1, norm 0.
Ensemble init_ensemble(const ModelSpec& model, SpinBasisState psi0, const SGrid& grid);

// w_ctrl <- g(s_ref) w_ctrl and reweight[s] <- reweight[s] g(s)/g(s_ref)
// with g(s) = r/(s+r+i dE) in loop mode and 1/(s+r+i dE) in initial mode,
// dE = E_free(ket) - E_free(bra). reweight[ref] stays exactly 1.
void free_update(Ensemble& e, const ModelSpec& model, double r, FreeUpdateMode mode);

// One sampled spawn attempt for a child of weight w_child on the pair
// (ket, bra) with dynamic norm parent_norm. ket_side selects which process
// jumps; pick_index in [0, n_t) selects the transition. Returns nothing if
// the chosen side has no transitions.
struct SpawnOutcome {
    std::uint64_t ket;
    std::uint64_t bra;
    std::complex<double> w_ctrl;
    std::uint32_t norm;
};
std::optional<SpawnOutcome> spawn_outcome(const ModelSpec& model, std::uint64_t ket,
                                          std::uint64_t bra, std::uint32_t parent_norm,
                                          std::complex<double> w_child, double kappa, double r,
                                          bool ket_side, int pick_index);

// Applies one stochastic jump attempt per triplet (the caller is expected to
// have run deactivation and pre_spawn_split; every triplet present counts as
// one active child). Parents persist unchanged, spawned triplets are
// appended. Returns the number of spawning attempts.
std::uint64_t spawn_step(Ensemble& e, const ModelSpec& model, const LoopSchedule& schedule,
                         RunRng& rng);

// Full main loop: init, initial free update, measure m = 1, then for
// m = 2..M_trunc: compress, deactivate, split, spawn, compress, free update,
// measure. Measurements store s * sum_n physical_weight * <bra|X|ket>.
RunResult run_simulation(const ModelSpec& model, SpinBasisState psi0, const SGrid& grid,
                         const LoopSchedule& schedule,
                         const std::vector<ObservableSpec>& observables, RunRng& rng);

} // namespace tqmc
