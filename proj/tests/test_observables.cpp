#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <complex>
#include <random>

#include "tqmc/observable.hpp"
#include "tqmc/oracle.hpp"

using namespace tqmc;

namespace {

// Tr(X rho) the slow way, straight from the eval callback
cplx slow_trace(const ObservableSpec& obs, const DenseMatrix& rho) {
    cplx acc = 0.0;
    for (Eigen::Index i = 0; i < rho.rows(); ++i)
        for (Eigen::Index j = 0; j < rho.cols(); ++j)
            acc += obs.eval(static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j)) *
                   rho(j, i);
    return acc;
}

DenseMatrix random_density(int dim, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    DenseMatrix rho(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j) rho(i, j) = cplx(u(gen), u(gen));
    return rho;
}

} // namespace

TEST_CASE("sigma_z reads single sites with 1-based indexing") {
    const ModelSpec m = make_xxz(4, 1.0, 0.9);
    const ObservableSpec o = make_sigma_z(m, 3);
    CHECK(o.name == "sigma_z_3");
    CHECK(o.diagonal_only);
    const std::uint64_t up3 = parse_state("ddud").bits;
    CHECK(o.eval(up3, up3) == cplx(1.0));
    CHECK(o.eval(0, 0) == cplx(-1.0));
    CHECK(o.eval(up3, 0) == cplx(0.0));
    CHECK_THROWS_AS(make_sigma_z(m, 0), invalid_input_error);
    CHECK_THROWS_AS(make_sigma_z(m, 5), invalid_input_error);
}

TEST_CASE("trace observable is the identity") {
    const ModelSpec m = make_xxz(3, 1.0, 0.9);
    const ObservableSpec o = make_total_trace(m);
    const DenseMatrix rho = random_density(8, 4);
    CHECK(std::abs(trace_with(o, rho) - rho.trace()) <= 1e-14);
}

TEST_CASE("projector observable is the initial-state overlap") {
    const ModelSpec m = make_xxz(4, 1.0, 0.9);
    const SpinBasisState psi0 = parse_state("uudd");
    const ObservableSpec o = make_projector(m, psi0);
    CHECK(o.name == "loschmidt");
    CHECK(o.eval(psi0.bits, psi0.bits) == cplx(1.0));
    CHECK(o.eval(psi0.bits, 0) == cplx(0.0));
    CHECK(o.eval(3, 3) == cplx(1.0)); // uudd is bits 0b0011
    CHECK_THROWS_AS(make_projector(m, parse_state("ud")), invalid_input_error);
}

TEST_CASE("bond energy density matches the Hamiltonian restricted to the bond") {
    const ModelSpec m = make_ising(4, 1.0, 0.2, 0.6);
    const ObservableSpec o = make_energy_density_bond(m, 2);
    CHECK_FALSE(o.diagonal_only);
    REQUIRE(o.offdiag_masks.size() == 2);

    // diagonal: -J s2 s3 - h_z (s2 + s3) / 2
    const std::uint64_t uudd = parse_state("uudd").bits;
    CHECK(o.eval(uudd, uudd) == cplx(-1.0 * (1) * (-1) - 0.5 * 0.6 * (1 - 1)));
    // one-site flips on the bond read -h_x/2
    CHECK(o.eval(uudd ^ 0b0010u, uudd) == cplx(-0.5 * 0.2));
    CHECK(o.eval(uudd ^ 0b0100u, uudd) == cplx(-0.5 * 0.2));
    // flips elsewhere or double flips do not contribute
    CHECK(o.eval(uudd ^ 0b0001u, uudd) == cplx(0.0));
    CHECK(o.eval(uudd ^ 0b0110u, uudd) == cplx(0.0));

    CHECK_THROWS_AS(make_energy_density_bond(m, 4), invalid_input_error);
    CHECK_THROWS_AS(make_energy_density_bond(make_xxz(4, 1, 1), 1), invalid_input_error);
}

TEST_CASE("bond energies sum to the full Hamiltonian expectation") {
    const ModelSpec m = make_ising(4, 1.0, 0.2, 0.6);
    const DenseOperatorRep rep = build_dense(m);
    const DenseMatrix rho = random_density(16, 9);
    cplx acc = 0.0;
    for (int b = 1; b < 4; ++b) acc += trace_with(make_energy_density_bond(m, b), rho);
    // interior fields are split between adjacent bonds; the edge sites only
    // appear in one bond, so add their missing field halves back
    const ObservableSpec z1 = make_sigma_z(m, 1), z4 = make_sigma_z(m, 4);
    acc -= 0.5 * 0.6 * (trace_with(z1, rho) + trace_with(z4, rho));
    for (const int site0 : {0, 3}) {
        cplx flip = 0.0; // Tr(sigma_x rho) on an edge site
        for (Eigen::Index b = 0; b < 16; ++b)
            flip += rho(b, static_cast<Eigen::Index>(static_cast<std::uint64_t>(b) ^
                                                     (std::uint64_t{1} << site0)));
        acc -= 0.5 * 0.2 * flip;
    }
    const cplx full = (rep.h_total * rho).trace();
    CHECK(std::abs(acc - full) <= 1e-12);
}

TEST_CASE("trace_with agrees with the direct double sum") {
    const ModelSpec xxz = make_xxz(3, 1.0, 0.9);
    const ModelSpec ising = make_ising(3, 1.0, 0.2, 0.6);
    const DenseMatrix rho = random_density(8, 21);
    const SpinBasisState psi0 = parse_state("uud");
    for (const auto& o : standard_observable_suite(ising, psi0))
        CHECK(std::abs(trace_with(o, rho) - slow_trace(o, rho)) <= 1e-12);
    for (const auto& o : standard_observable_suite(xxz, psi0))
        CHECK(std::abs(trace_with(o, rho) - slow_trace(o, rho)) <= 1e-12);
}

TEST_CASE("standard suite composition") {
    const SpinBasisState psi0 = parse_state("uudd");
    const auto xxz = standard_observable_suite(make_xxz(4, 1.0, 0.9), psi0);
    // trace + L sigma_z + loschmidt
    CHECK(xxz.size() == 1 + 4 + 1);
    const auto ising = standard_observable_suite(make_ising(4, 1.0, 0.2, 0.6), psi0);
    // ... + L-1 bond energies
    CHECK(ising.size() == 1 + 4 + 1 + 3);
}

TEST_CASE("observable lookup by name") {
    const ModelSpec m = make_ising(4, 1.0, 0.2, 0.6);
    const SpinBasisState psi0 = parse_state("uudd");
    CHECK(observable_by_name(m, psi0, "trace").name == "trace");
    CHECK(observable_by_name(m, psi0, "sigma_z_2").name == "sigma_z_2");
    CHECK(observable_by_name(m, psi0, "energy_bond_3").name == "energy_bond_3");
    CHECK(observable_by_name(m, psi0, "loschmidt").name == "loschmidt");
    CHECK_THROWS_AS(observable_by_name(m, psi0, "sigma_x_1"), invalid_config_error);
    CHECK_THROWS_AS(observable_by_name(m, psi0, "sigma_z_"), invalid_config_error);
}
