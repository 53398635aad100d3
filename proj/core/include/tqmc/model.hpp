#pragma once
#include <cstdint>
#include <optional>
#include <vector>

#include "tqmc/basis.hpp"

namespace tqmc {

enum class ModelKind { XXZ, Ising };

// Spin-chain Hamiltonian with an exactly diagonal free part and an
// off-diagonal interaction part (open boundaries).
//   XXZ:   H_free = J_z sum_i sz_i sz_{i+1},
//          H_int  = hopping, amplitude 2*J_xy per anti-aligned pair.
//   Ising: H_free = -J sum_i sz_i sz_{i+1} - h_z sum_i sz_i,
//          H_int  = -h_x sum_i sx_i.
struct ModelSpec {
    ModelKind kind = ModelKind::XXZ;
    int L = 0;
    double J_xy = 0.0;
    double J_z = 0.0;
    double J = 0.0;
    double h_x = 0.0;
    double h_z = 0.0;
};

ModelSpec make_xxz(int L, double J_xy, double J_z);
ModelSpec make_ising(int L, double J, double h_x, double h_z);

// One nonzero off-diagonal matrix element <target|H_int|source>.
struct Transition {
    std::uint64_t target;
    double amplitude;
};

double free_energy(const ModelSpec& m, const SpinBasisState& s);
double free_energy_bits(const ModelSpec& m, std::uint64_t bits);

// All interaction transitions out of `state`; its length is n_t.
std::vector<Transition> transitions(const ModelSpec& m, const SpinBasisState& state);
void transitions_bits(const ModelSpec& m, std::uint64_t bits, std::vector<Transition>& out);

// Allocation-free access for sampling hot paths: the number of transitions
// and the index-th one (index < transition_count_bits, same order as the
// vector version).
int transition_count_bits(const ModelSpec& m, std::uint64_t bits);
Transition transition_at_bits(const ModelSpec& m, std::uint64_t bits, int index);

// Minimum number of interaction applications connecting a and b.
// XXZ: sum_k |p_k - q_k| over sorted up-spin positions (adjacent-exchange
// count), nullopt when the magnetization sectors differ (unreachable).
// Ising: Hamming distance.
std::optional<std::uint32_t> dynamic_norm(const ModelSpec& m, const SpinBasisState& a,
                                          const SpinBasisState& b);
std::optional<std::uint32_t> dynamic_norm_bits(const ModelSpec& m, std::uint64_t a,
                                               std::uint64_t b);

enum class InitialStateKind { domain_wall, all_up, custom };

SpinBasisState initial_state(const ModelSpec& m, InitialStateKind kind,
                             std::uint64_t custom_bits = 0);

} // namespace tqmc
