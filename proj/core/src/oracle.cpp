#include "tqmc/oracle.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>

#include "tqmc/errors.hpp"

namespace tqmc {

namespace {
constexpr std::complex<double> I(0.0, 1.0);

Eigen::Index dense_dim(const ModelSpec& model, int max_l, const char* who) {
    if (model.L > max_l)
        throw resource_limit_error(std::string(who) +
                                   ": chain too long for the dense representation; "
                                   "use the time-domain reference");
    return Eigen::Index{1} << model.L;
}
} // namespace

DenseOperatorRep build_dense(const ModelSpec& model) {
    DenseOperatorRep rep;
    rep.L = model.L;
    rep.dim = dense_dim(model, 10, "build_dense");
    rep.free_energies.resize(rep.dim);
    rep.h_int = DenseMatrix::Zero(rep.dim, rep.dim);
    std::vector<Transition> trs;
    for (Eigen::Index i = 0; i < rep.dim; ++i) {
        const auto bits = static_cast<std::uint64_t>(i);
        rep.free_energies[i] = free_energy_bits(model, bits);
        transitions_bits(model, bits, trs);
        for (const auto& tr : trs)
            rep.h_int(static_cast<Eigen::Index>(tr.target), i) += tr.amplitude;
    }
    rep.h_total = rep.h_int;
    rep.h_total.diagonal() += rep.free_energies.cast<std::complex<double>>();
    const double asym = (rep.h_total - rep.h_total.adjoint()).cwiseAbs().maxCoeff();
    if (asym > 1e-12) throw contract_violation("build_dense: Hamiltonian not Hermitian");
    return rep;
}

DenseMatrix basis_density(const SpinBasisState& psi) {
    const Eigen::Index dim = Eigen::Index{1} << psi.L;
    DenseMatrix rho = DenseMatrix::Zero(dim, dim);
    rho(static_cast<Eigen::Index>(psi.bits), static_cast<Eigen::Index>(psi.bits)) = 1.0;
    return rho;
}

DenseMatrix apply_liouvillian(const ModelSpec& model, const DenseMatrix& rho) {
    const auto rep = build_dense(model);
    return -I * (rep.h_total * rho - rho * rep.h_total);
}

DenseMatrix apply_interaction_liouvillian(const ModelSpec& model, const DenseMatrix& rho) {
    const auto rep = build_dense(model);
    return -I * (rep.h_int * rho - rho * rep.h_int);
}

DenseMatrix apply_free_resolvent(const ModelSpec& model, const DenseMatrix& rho,
                                 double s_plus_r) {
    const Eigen::Index dim = rho.rows();
    DenseMatrix out(dim, dim);
    std::vector<double> e(dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        e[i] = free_energy_bits(model, static_cast<std::uint64_t>(i));
    for (Eigen::Index j = 0; j < dim; ++j)
        for (Eigen::Index i = 0; i < dim; ++i)
            out(i, j) = rho(i, j) / std::complex<double>(s_plus_r, e[i] - e[j]);
    return out;
}

DenseMatrix apply_transfer(const ModelSpec& model, const DenseMatrix& rho, double s, double r) {
    const DenseMatrix inner = rho + apply_interaction_liouvillian(model, rho) / r;
    return r * apply_free_resolvent(model, inner, s + r);
}

DenseMatrix dense_resolvent(const ModelSpec& model, const DenseMatrix& rho0, double s) {
    if (!(s > 0.0)) throw invalid_input_error("dense_resolvent: s must be positive");
    dense_dim(model, 8, "dense_resolvent");
    const auto rep = build_dense(model);
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(rep.h_total);
    if (es.info() != Eigen::Success)
        throw accuracy_error("dense_resolvent: eigendecomposition failed");
    const DenseMatrix& v = es.eigenvectors();
    const Eigen::VectorXd& en = es.eigenvalues();
    DenseMatrix a = v.adjoint() * rho0 * v;
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            a(i, j) /= std::complex<double>(s, en[i] - en[j]);
    DenseMatrix x = v * a * v.adjoint();

    // residual of (s - L) x = rho0 relative to |rho0|
    const DenseMatrix resid = s * x + I * (rep.h_total * x - x * rep.h_total) - rho0;
    const double scale = std::max(1.0, rho0.cwiseAbs().maxCoeff());
    if (resid.cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw accuracy_error("dense_resolvent: linear-system residual above 1e-10");
    return s * x;
}

DenseMatrix dense_resolvent(const ModelSpec& model, const SpinBasisState& psi0, double s) {
    if (psi0.L != model.L)
        throw invalid_input_error("dense_resolvent: state length does not match model L");
    return dense_resolvent(model, basis_density(psi0), s);
}

DenseMatrix dense_truncated_magic(const ModelSpec& model, const DenseMatrix& rho0, double s,
                                  double r, std::uint64_t m_max) {
    if (!(s > 0.0) || !(r > 0.0))
        throw invalid_input_error("dense_truncated_magic: s and r must be positive");
    dense_dim(model, 6, "dense_truncated_magic");
    const auto rep = build_dense(model);
    const Eigen::Index dim = rep.dim;

    const auto free_resolvent = [&](const DenseMatrix& rho) {
        DenseMatrix out(dim, dim);
        for (Eigen::Index j = 0; j < dim; ++j)
            for (Eigen::Index i = 0; i < dim; ++i)
                out(i, j) = rho(i, j) / std::complex<double>(
                                            s + r, rep.free_energies[i] - rep.free_energies[j]);
        return out;
    };
    const auto lint = [&](const DenseMatrix& rho) -> DenseMatrix {
        return -I * (rep.h_int * rho - rho * rep.h_int);
    };

    DenseMatrix x = free_resolvent(rho0);
    DenseMatrix acc = x;
    for (std::uint64_t m = 1; m <= m_max; ++m) {
        x = r * free_resolvent(x + lint(x) / r);
        acc += x;
    }
    return s * acc;
}

std::complex<double> trace_with(const ObservableSpec& obs, const DenseMatrix& rho) {
    const Eigen::Index dim = rho.rows();
    std::complex<double> acc = 0.0;
    for (Eigen::Index i = 0; i < dim; ++i) {
        const auto bits = static_cast<std::uint64_t>(i);
        acc += obs.eval(bits, bits) * rho(i, i);
        for (const auto msk : obs.offdiag_masks) {
            const std::uint64_t k = bits ^ msk;
            acc += obs.eval(k, bits) * rho(i, static_cast<Eigen::Index>(k));
        }
    }
    return acc;
}

namespace {

// y = H x using the on-the-fly sparse structure
void apply_hamiltonian(const ModelSpec& model, const Eigen::VectorXcd& x, Eigen::VectorXcd& y) {
    const Eigen::Index dim = x.size();
    std::vector<Transition> trs;
    for (Eigen::Index i = 0; i < dim; ++i) {
        const auto bits = static_cast<std::uint64_t>(i);
        y[i] += free_energy_bits(model, bits) * x[i];
        transitions_bits(model, bits, trs);
        for (const auto& tr : trs) y[static_cast<Eigen::Index>(tr.target)] += tr.amplitude * x[i];
    }
}

// one step psi <- exp(-i H dt) psi with a Lanczos polynomial propagator,
// fully reorthogonalized, a posteriori local error below tol
void krylov_step(const ModelSpec& model, Eigen::VectorXcd& psi, double dt, double tol) {
    constexpr int k_max = 60;
    const Eigen::Index dim = psi.size();
    const double nrm0 = psi.norm();
    if (nrm0 == 0.0) throw invalid_input_error("krylov_step: zero state");

    std::vector<Eigen::VectorXcd> v;
    v.reserve(k_max + 1);
    v.push_back(psi / nrm0);
    std::vector<double> alpha, beta; // tridiagonal entries

    Eigen::VectorXcd w(dim);
    for (int k = 0; k < k_max; ++k) {
        w.setZero();
        apply_hamiltonian(model, v[k], w);
        // full reorthogonalization keeps the basis clean at these sizes
        for (std::size_t j = 0; j < v.size(); ++j) {
            const std::complex<double> h = v[j].dot(w);
            if (j == v.size() - 1) alpha.push_back(h.real());
            w -= h * v[j];
        }
        for (std::size_t j = 0; j < v.size(); ++j) w -= v[j].dot(w) * v[j];
        const double b = w.norm();

        // exponentiate the (k+1)x(k+1) tridiagonal block
        const int kk = k + 1;
        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(kk, kk);
        for (int i = 0; i < kk; ++i) {
            t(i, i) = alpha[static_cast<std::size_t>(i)];
            if (i + 1 < kk) {
                t(i, i + 1) = beta[static_cast<std::size_t>(i)];
                t(i + 1, i) = beta[static_cast<std::size_t>(i)];
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
        Eigen::VectorXcd phases(kk);
        for (int i = 0; i < kk; ++i) phases[i] = std::exp(-I * es.eigenvalues()[i] * dt);
        const Eigen::VectorXcd u =
            es.eigenvectors().cast<std::complex<double>>() *
            (phases.array() * es.eigenvectors().row(0).transpose().cast<std::complex<double>>().array())
                .matrix();

        // happy breakdown or converged error estimate
        if (b < 1e-14 || b * std::abs(u[kk - 1]) < tol) {
            psi.setZero();
            for (int i = 0; i < kk; ++i) psi += u[i] * v[static_cast<std::size_t>(i)];
            psi *= nrm0;
            return;
        }
        beta.push_back(b);
        v.push_back(w / b);
    }
    throw accuracy_error("krylov_step: no convergence at the maximal Krylov dimension; "
                         "reduce dt");
}

} // namespace

std::vector<TimeSeries> time_domain_reference(const ModelSpec& model,
                                              const SpinBasisState& psi0,
                                              const std::vector<ObservableSpec>& observables,
                                              double t_max, double dt) {
    if (psi0.L != model.L)
        throw invalid_input_error("time_domain_reference: state length does not match model L");
    if (model.L > 20)
        throw resource_limit_error("time_domain_reference: L > 20 not supported");
    if (!(dt > 0.0) || !(t_max >= 0.0))
        throw invalid_input_error("time_domain_reference: need dt > 0 and t_max >= 0");

    const Eigen::Index dim = Eigen::Index{1} << model.L;
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
    psi[static_cast<Eigen::Index>(psi0.bits)] = 1.0;

    const auto n_steps = static_cast<std::size_t>(std::llround(t_max / dt));
    std::vector<TimeSeries> out(observables.size());
    for (auto& ts : out) {
        ts.dt = dt;
        ts.values.reserve(n_steps + 1);
    }

    const auto record = [&]() {
        for (std::size_t o = 0; o < observables.size(); ++o) {
            const ObservableSpec& obs = observables[o];
            std::complex<double> val = 0.0;
            for (Eigen::Index i = 0; i < dim; ++i) {
                if (psi[i] == std::complex<double>(0.0)) continue;
                const auto bits = static_cast<std::uint64_t>(i);
                const std::complex<double> d = obs.eval(bits, bits);
                if (d != std::complex<double>(0.0)) val += std::norm(psi[i]) * d;
                for (const auto msk : obs.offdiag_masks) {
                    const std::uint64_t k = bits ^ msk;
                    const std::complex<double> x = obs.eval(k, bits); // <k|X|i>
                    if (x != std::complex<double>(0.0))
                        val += std::conj(psi[static_cast<Eigen::Index>(k)]) * x * psi[i];
                }
            }
            if (std::abs(val.imag()) > 1e-8)
                throw contract_violation("time_domain_reference: non-real expectation of a "
                                         "Hermitian observable");
            out[o].values.push_back(val.real());
        }
    };

    record();
    for (std::size_t n = 0; n < n_steps; ++n) {
        krylov_step(model, psi, dt, 1e-10);
        const double nrm = psi.norm();
        if (std::abs(nrm - 1.0) > 1e-9)
            throw accuracy_error("time_domain_reference: norm drift beyond 1e-9");
        record();
    }
    return out;
}

TimeSeries time_domain_reference(const ModelSpec& model, const SpinBasisState& psi0,
                                 const ObservableSpec& observable, double t_max, double dt) {
    return time_domain_reference(model, psi0, std::vector<ObservableSpec>{observable}, t_max,
                                 dt)[0];
}

QuadratureResult laplace_quadrature(const TimeSeries& series, double s, double tail_tolerance) {
    if (!(s > 0.0)) throw invalid_input_error("laplace_quadrature: s must be positive");
    if (series.values.size() < 2 || !(series.dt > 0.0))
        throw invalid_input_error("laplace_quadrature: need a sampled series");

    const auto& f = series.values;
    const double dt = series.dt;
    const std::size_t n = f.size() - 1; // interval count
    const auto g = [&](std::size_t k) { return f[k] * std::exp(-s * dt * static_cast<double>(k)); };

    double integral = 0.0;
    std::size_t simpson_end = n; // intervals [0, simpson_end) handled by Simpson
    if (n % 2 == 1) {
        if (n < 3)
            throw invalid_input_error("laplace_quadrature: need at least 3 intervals for an "
                                      "odd interval count");
        simpson_end = n - 3; // closing 3/8 rule on the last three intervals
    }
    for (std::size_t k = 0; k + 2 <= simpson_end; k += 2)
        integral += dt / 3.0 * (g(k) + 4.0 * g(k + 1) + g(k + 2));
    if (simpson_end != n)
        integral += 3.0 * dt / 8.0 *
                    (g(n - 3) + 3.0 * g(n - 2) + 3.0 * g(n - 1) + g(n));

    double fmax = 0.0;
    for (const double x : f) fmax = std::max(fmax, std::abs(x));
    const double t_end = dt * static_cast<double>(n);

    QuadratureResult out;
    out.value = s * integral;
    out.tail_bound = fmax * std::exp(-s * t_end);
    out.tail_warning = out.tail_bound > tail_tolerance;
    return out;
}

} // namespace tqmc
