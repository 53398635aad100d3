#include "tqmc/observable.hpp"

#include <charconv>

namespace tqmc {

ObservableSpec make_total_trace(const ModelSpec&) {
    ObservableSpec o;
    o.name = "trace";
    o.diagonal_only = true;
    o.eval = [](std::uint64_t bra, std::uint64_t ket) -> cplx {
        return bra == ket ? 1.0 : 0.0;
    };
    return o;
}

ObservableSpec make_sigma_z(const ModelSpec& m, int site1) {
    if (site1 < 1 || site1 > m.L) throw invalid_input_error("sigma_z site out of range");
    ObservableSpec o;
    o.name = "sigma_z_" + std::to_string(site1);
    o.diagonal_only = true;
    const int k = site1 - 1;
    o.eval = [k](std::uint64_t bra, std::uint64_t ket) -> cplx {
        if (bra != ket) return 0.0;
        return spin_at(ket, k);
    };
    return o;
}

ObservableSpec make_projector(const ModelSpec& m, const SpinBasisState& psi) {
    if (psi.L != m.L) throw invalid_input_error("projector state length mismatch");
    ObservableSpec o;
    o.name = "loschmidt";
    o.diagonal_only = true; // its only nonzero element is on the diagonal
    const std::uint64_t p = psi.bits;
    o.eval = [p](std::uint64_t bra, std::uint64_t ket) -> cplx {
        return (bra == p && ket == p) ? 1.0 : 0.0;
    };
    return o;
}

ObservableSpec make_energy_density_bond(const ModelSpec& m, int bond1) {
    if (m.kind != ModelKind::Ising)
        throw invalid_input_error("energy_bond observable is defined for the Ising chain");
    if (bond1 < 1 || bond1 >= m.L) throw invalid_input_error("energy bond out of range");
    ObservableSpec o;
    o.name = "energy_bond_" + std::to_string(bond1);
    o.diagonal_only = false;
    const int i = bond1 - 1; // 0-based left site of the bond
    const std::uint64_t mi = std::uint64_t{1} << i;
    const std::uint64_t mj = std::uint64_t{1} << (i + 1);
    o.offdiag_masks = {mi, mj};
    const double J = m.J, hx = m.h_x, hz = m.h_z;
    o.eval = [i, mi, mj, J, hx, hz](std::uint64_t bra, std::uint64_t ket) -> cplx {
        const std::uint64_t diff = bra ^ ket;
        if (diff == 0) {
            const double si = spin_at(ket, i);
            const double sj = spin_at(ket, i + 1);
            return -J * si * sj - 0.5 * hz * (si + sj);
        }
        if (diff == mi || diff == mj) return -0.5 * hx;
        return 0.0;
    };
    return o;
}

std::vector<ObservableSpec> standard_observable_suite(const ModelSpec& m,
                                                      const SpinBasisState& psi0) {
    std::vector<ObservableSpec> suite;
    suite.push_back(make_total_trace(m));
    for (int i = 1; i <= m.L; ++i) suite.push_back(make_sigma_z(m, i));
    suite.push_back(make_projector(m, psi0));
    if (m.kind == ModelKind::Ising)
        for (int b = 1; b < m.L; ++b) suite.push_back(make_energy_density_bond(m, b));
    return suite;
}

static bool parse_indexed(const std::string& name, const std::string& prefix, int& idx) {
    if (name.rfind(prefix, 0) != 0) return false;
    const char* first = name.data() + prefix.size();
    const char* last = name.data() + name.size();
    auto [p, ec] = std::from_chars(first, last, idx);
    return ec == std::errc{} && p == last;
}

ObservableSpec observable_by_name(const ModelSpec& m, const SpinBasisState& psi0,
                                  const std::string& name) {
    if (name == "trace") return make_total_trace(m);
    if (name == "loschmidt") return make_projector(m, psi0);
    int idx = 0;
    if (parse_indexed(name, "sigma_z_", idx)) return make_sigma_z(m, idx);
    if (parse_indexed(name, "energy_bond_", idx)) return make_energy_density_bond(m, idx);
    throw invalid_config_error("unknown observable name: " + name);
}

} // namespace tqmc
