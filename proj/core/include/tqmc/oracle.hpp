#pragma once
#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "tqmc/basis.hpp"
#include "tqmc/model.hpp"
#include "tqmc/observable.hpp"

namespace tqmc {

using DenseMatrix = Eigen::MatrixXcd;

// Dense computational-basis representation (row/column index = state bits).
struct DenseOperatorRep {
    int L = 0;
    Eigen::Index dim = 0;
    Eigen::VectorXd free_energies;
    DenseMatrix h_int;
    DenseMatrix h_total;
};

DenseOperatorRep build_dense(const ModelSpec& model); // L <= 10 (memory guard)

DenseMatrix basis_density(const SpinBasisState& psi); // |psi><psi|

// Exact Laplace-domain state s * R_s rho0 via the eigendecomposition of H;
// verified internally against the defining linear system to 1e-10.
DenseMatrix dense_resolvent(const ModelSpec& model, const DenseMatrix& rho0, double s);
DenseMatrix dense_resolvent(const ModelSpec& model, const SpinBasisState& psi0, double s);

// Deterministic truncated series s * sum_{m=0}^{M} T^m R_free rho0 with
// T = r R_free (1 + L_int / r); the dense twin of the stochastic main loop.
DenseMatrix dense_truncated_magic(const ModelSpec& model, const DenseMatrix& rho0, double s,
                                  double r, std::uint64_t m_max);

// Superoperator building blocks, applied to a density-matrix argument.
DenseMatrix apply_liouvillian(const ModelSpec& model, const DenseMatrix& rho); // -i[H, rho]
DenseMatrix apply_interaction_liouvillian(const ModelSpec& model, const DenseMatrix& rho);
DenseMatrix apply_free_resolvent(const ModelSpec& model, const DenseMatrix& rho,
                                 double s_plus_r);
DenseMatrix apply_transfer(const ModelSpec& model, const DenseMatrix& rho, double s, double r);

// Tr(X rho) using the observable's diagonal and flip-mask structure.
std::complex<double> trace_with(const ObservableSpec& obs, const DenseMatrix& rho);

struct TimeSeries {
    double dt = 0.0;
    std::vector<double> values; // <X>_t at t = 0, dt, 2 dt, ...
};

// Wavefunction propagation with a Krylov polynomial stepper (local error
// <= 1e-10 per step); pure initial states only, reaching L ~ 20 with the
// on-the-fly sparse Hamiltonian. One propagation serves all observables.
std::vector<TimeSeries> time_domain_reference(const ModelSpec& model,
                                              const SpinBasisState& psi0,
                                              const std::vector<ObservableSpec>& observables,
                                              double t_max, double dt);
TimeSeries time_domain_reference(const ModelSpec& model, const SpinBasisState& psi0,
                                 const ObservableSpec& observable, double t_max, double dt);

struct QuadratureResult {
    double value = 0.0;      // s * integral_0^{T} <X>_t e^{-s t} dt
    double tail_bound = 0.0; // max|<X>| * exp(-s T)
    bool tail_warning = false;
};

QuadratureResult laplace_quadrature(const TimeSeries& series, double s,
                                    double tail_tolerance = 1e-6);

} // namespace tqmc
