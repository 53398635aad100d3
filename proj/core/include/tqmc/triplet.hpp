#pragma once
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "tqmc/errors.hpp"

namespace tqmc {

using cplx = std::complex<double>;

// One Monte Carlo walker representing w * |ket><bra|. `w_ctrl` is the
// ensemble (control) weight evaluated at the reference grid point; the
// reweight vector carries the accumulated free-evolution ratio for every
// other grid point (entry at ref_index stays exactly 1). `norm` caches the
// dynamic norm of (ket, bra).
struct Triplet {
    cplx w_ctrl;
    std::uint64_t ket = 0;
    std::uint64_t bra = 0;
    std::uint32_t norm = 0;
    std::vector<cplx> reweight;
};

// c = w * reweight[s] * exp(kappa n^2 / 2)  (harmonic importance-sampling bias)
inline cplx physical_weight(const Triplet& t, double kappa, std::size_t s_index) {
    const double bias = std::exp(0.5 * kappa * static_cast<double>(t.norm) *
                                 static_cast<double>(t.norm));
    return t.w_ctrl * t.reweight[s_index] * bias;
}

} // namespace tqmc
