#pragma once
#include <cstdint>
#include <vector>

#include "tqmc/rng.hpp"
#include "tqmc/sgrid.hpp"
#include "tqmc/triplet.hpp"

namespace tqmc {

struct Ensemble {
    SGrid s_grid;
    std::vector<Triplet> triplets;
    std::uint64_t loop_index = 0;
    // classes dropped because their control weights summed to exactly zero
    std::uint64_t cancellations = 0;
};

// Merge triplets sharing a (ket, bra) pair: control weights add, reweight
// vectors combine by the control-weight-weighted average, so the per-s
// physical class weight sum_n w_n * reweight_n[s] is conserved exactly.
// Exactly-cancelled classes are dropped and counted. Output is sorted by
// (ket, bra), making the result independent of input order.
void compress(Ensemble& e);

// Split into N_c = max(1, floor(|w|/w_u)) children of weight w/N_c each.
std::vector<Triplet> pre_spawn_split(const Triplet& t, double w_u);

enum class DeactivateOutcome { killed, survives_inactive };

// Stochastic resolution of a below-threshold triplet: survives with
// probability |w|/u_dw, promoted to modulus u_dw with its phase kept. A
// survivor skips spawning for the current loop but still evolves freely.
DeactivateOutcome deactivate(Triplet& t, double u_dw, RunRng& rng);

// floor(|w|/w_u) unit-modulus children plus a stochastically resolved rest
// (kept with probability fraction/w_u and promoted to modulus w_u);
// conserves the weight in expectation, phase preserved throughout.
std::vector<Triplet> stochastic_decompress(const Triplet& t, double w_u, RunRng& rng);

} // namespace tqmc
