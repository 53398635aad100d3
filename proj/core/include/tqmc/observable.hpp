#pragma once
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "tqmc/model.hpp"

namespace tqmc {

using cplx = std::complex<double>;

// Matrix-element evaluator for a Hermitian operator X. `offdiag_masks`
// lists the bit-flip masks m for which <k^m|X|k> may be nonzero (empty for
// diagonal operators); it lets dense code apply X without scanning all
// state pairs.
struct ObservableSpec {
    std::string name;
    bool diagonal_only = true;
    std::vector<std::uint64_t> offdiag_masks;
    std::function<cplx(std::uint64_t bra, std::uint64_t ket)> eval;
};

ObservableSpec make_total_trace(const ModelSpec& m);
ObservableSpec make_sigma_z(const ModelSpec& m, int site1); // 1-based site
ObservableSpec make_projector(const ModelSpec& m, const SpinBasisState& psi);
// Bond energy density for the Ising chain (1-based bond i = sites i, i+1):
//   -J sz_i sz_{i+1} - (h_x/2)(sx_i + sx_{i+1}) - (h_z/2)(sz_i + sz_{i+1})
ObservableSpec make_energy_density_bond(const ModelSpec& m, int bond1);

// identity + sigma_z per site + initial-state projector (+ bond energies, Ising)
std::vector<ObservableSpec> standard_observable_suite(const ModelSpec& m,
                                                      const SpinBasisState& psi0);

// Resolve "trace", "sigma_z_<i>", "loschmidt", "energy_bond_<i>".
ObservableSpec observable_by_name(const ModelSpec& m, const SpinBasisState& psi0,
                                  const std::string& name);

} // namespace tqmc
