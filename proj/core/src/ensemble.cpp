#include "tqmc/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include "tqmc/errors.hpp"

namespace tqmc {

void compress(Ensemble& e) {
    auto& ts = e.triplets;
    if (ts.empty()) return;
    const std::size_t ns = e.s_grid.size();
    const std::size_t ref = e.s_grid.ref_index;

    std::sort(ts.begin(), ts.end(), [](const Triplet& a, const Triplet& b) {
        if (a.ket != b.ket) return a.ket < b.ket;
        return a.bra < b.bra;
    });

    std::vector<Triplet> out;
    out.reserve(ts.size());
    std::size_t i = 0;
    while (i < ts.size()) {
        std::size_t j = i + 1;
        while (j < ts.size() && ts[j].ket == ts[i].ket && ts[j].bra == ts[i].bra) ++j;
        if (j == i + 1) {
            out.push_back(std::move(ts[i]));
            i = j;
            continue;
        }
        // rw_sum[k] = sum_n w_n * reweight_n[k]; since reweight[ref] is
        // exactly 1 for every member, rw_sum[ref] doubles as the control
        // weight sum and the division below restores an exact 1 there.
        std::vector<std::complex<double>> rw_sum(ns, 0.0);
        for (std::size_t n = i; n < j; ++n)
            for (std::size_t k = 0; k < ns; ++k)
                rw_sum[k] += ts[n].w_ctrl * ts[n].reweight[k];
        const std::complex<double> w_sum = rw_sum[ref];
        if (w_sum.real() == 0.0 && w_sum.imag() == 0.0) {
            ++e.cancellations;
            i = j;
            continue;
        }
        Triplet m;
        m.w_ctrl = w_sum;
        m.ket = ts[i].ket;
        m.bra = ts[i].bra;
        m.norm = ts[i].norm;
        m.reweight.resize(ns);
        for (std::size_t k = 0; k < ns; ++k) m.reweight[k] = rw_sum[k] / w_sum;
        m.reweight[ref] = 1.0;
        out.push_back(std::move(m));
        i = j;
    }
    ts = std::move(out);
}

std::vector<Triplet> pre_spawn_split(const Triplet& t, double w_u) {
    if (!(w_u > 0.0))
        throw invalid_config_error("pre_spawn_split: unit weight w_u must be positive");
    const double ratio = std::abs(t.w_ctrl) / w_u;
    std::uint64_t n_c = 1;
    if (ratio >= 2.0) {
        if (ratio >= 9.0e18)
            throw resource_limit_error("pre_spawn_split: child count overflow", 0, 0);
        n_c = static_cast<std::uint64_t>(ratio);
    }
    std::vector<Triplet> children(n_c, t);
    if (n_c > 1) {
        const std::complex<double> w_child = t.w_ctrl / static_cast<double>(n_c);
        for (auto& c : children) c.w_ctrl = w_child;
    }
    return children;
}

DeactivateOutcome deactivate(Triplet& t, double u_dw, RunRng& rng) {
    if (!(u_dw > 0.0))
        throw invalid_config_error("deactivate: threshold u_dw must be positive");
    const double mag = std::abs(t.w_ctrl);
    if (mag >= u_dw)
        throw contract_violation("deactivate: triplet weight not below threshold");
    if (mag == 0.0) return DeactivateOutcome::killed;
    if (rng.uniform() < mag / u_dw) {
        t.w_ctrl *= u_dw / mag;
        return DeactivateOutcome::survives_inactive;
    }
    return DeactivateOutcome::killed;
}

std::vector<Triplet> stochastic_decompress(const Triplet& t, double w_u, RunRng& rng) {
    if (!(w_u > 0.0))
        throw invalid_config_error("stochastic_decompress: unit weight w_u must be positive");
    const double mag = std::abs(t.w_ctrl);
    std::vector<Triplet> out;
    if (mag == 0.0) return out;
    double whole = 0.0;
    const double frac = std::modf(mag / w_u, &whole);
    if (whole >= 9.0e18)
        throw resource_limit_error("stochastic_decompress: child count overflow", 0, 0);
    const auto n = static_cast<std::uint64_t>(whole);
    const std::complex<double> unit = t.w_ctrl * (w_u / mag);
    out.reserve(n + 1);
    for (std::uint64_t k = 0; k < n; ++k) {
        out.push_back(t);
        out.back().w_ctrl = unit;
    }
    if (frac > 0.0 && rng.uniform() < frac) {
        out.push_back(t);
        out.back().w_ctrl = unit;
    }
    return out;
}

} // namespace tqmc
