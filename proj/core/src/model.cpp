#include "tqmc/model.hpp"

#include <algorithm>
#include <array>

namespace tqmc {

ModelSpec make_xxz(int L, double J_xy, double J_z) {
    if (L < 2 || L > 63) throw invalid_input_error("XXZ: L must be in [2, 63]");
    ModelSpec m;
    m.kind = ModelKind::XXZ;
    m.L = L;
    m.J_xy = J_xy;
    m.J_z = J_z;
    return m;
}

ModelSpec make_ising(int L, double J, double h_x, double h_z) {
    if (L < 2 || L > 63) throw invalid_input_error("Ising: L must be in [2, 63]");
    ModelSpec m;
    m.kind = ModelKind::Ising;
    m.L = L;
    m.J = J;
    m.h_x = h_x;
    m.h_z = h_z;
    return m;
}

static void check_length(const ModelSpec& m, const SpinBasisState& s) {
    if (s.L != m.L) throw invalid_input_error("state length does not match model L");
}

double free_energy_bits(const ModelSpec& m, std::uint64_t bits) {
    // bond count of aligned minus anti-aligned pairs from a bit trick:
    // x = bits ^ (bits >> 1) marks anti-aligned bonds in its low L-1 bits.
    const int nbonds = m.L - 1;
    const std::uint64_t anti_mask = (bits ^ (bits >> 1)) & ((std::uint64_t{1} << nbonds) - 1);
    const int anti = popcount64(anti_mask);
    const int aligned = nbonds - anti;
    const double zz = static_cast<double>(aligned - anti);
    if (m.kind == ModelKind::XXZ) return m.J_z * zz;
    const int ups = popcount64(bits);
    const double mz = static_cast<double>(2 * ups - m.L);
    return -m.J * zz - m.h_z * mz;
}

double free_energy(const ModelSpec& m, const SpinBasisState& s) {
    check_length(m, s);
    return free_energy_bits(m, s.bits);
}

void transitions_bits(const ModelSpec& m, std::uint64_t bits, std::vector<Transition>& out) {
    out.clear();
    if (m.kind == ModelKind::XXZ) {
        // one exchange per anti-aligned nearest-neighbour pair
        const int nbonds = m.L - 1;
        std::uint64_t anti = (bits ^ (bits >> 1)) & ((std::uint64_t{1} << nbonds) - 1);
        while (anti) {
            const int i = std::countr_zero(anti);
            anti &= anti - 1;
            out.push_back({bits ^ (std::uint64_t{3} << i), 2.0 * m.J_xy});
        }
    } else {
        for (int i = 0; i < m.L; ++i)
            out.push_back({bits ^ (std::uint64_t{1} << i), -m.h_x});
    }
}

std::vector<Transition> transitions(const ModelSpec& m, const SpinBasisState& state) {
    check_length(m, state);
    std::vector<Transition> out;
    transitions_bits(m, state.bits, out);
    return out;
}

int transition_count_bits(const ModelSpec& m, std::uint64_t bits) {
    if (m.kind == ModelKind::Ising) return m.L;
    const int nbonds = m.L - 1;
    return popcount64((bits ^ (bits >> 1)) & ((std::uint64_t{1} << nbonds) - 1));
}

Transition transition_at_bits(const ModelSpec& m, std::uint64_t bits, int index) {
    if (m.kind == ModelKind::Ising) return {bits ^ (std::uint64_t{1} << index), -m.h_x};
    const int nbonds = m.L - 1;
    std::uint64_t anti = (bits ^ (bits >> 1)) & ((std::uint64_t{1} << nbonds) - 1);
    for (int k = 0; k < index; ++k) anti &= anti - 1;
    return {bits ^ (std::uint64_t{3} << std::countr_zero(anti)), 2.0 * m.J_xy};
}

std::optional<std::uint32_t> dynamic_norm_bits(const ModelSpec& m, std::uint64_t a,
                                               std::uint64_t b) {
    if (m.kind == ModelKind::Ising) return static_cast<std::uint32_t>(popcount64(a ^ b));
    if (popcount64(a) != popcount64(b)) return std::nullopt;
    // order-preserving matching of up-spin positions is optimal for adjacent exchanges
    std::uint32_t n = 0;
    std::uint64_t x = a, y = b;
    while (x) {
        const int p = std::countr_zero(x);
        const int q = std::countr_zero(y);
        n += static_cast<std::uint32_t>(p > q ? p - q : q - p);
        x &= x - 1;
        y &= y - 1;
    }
    return n;
}

std::optional<std::uint32_t> dynamic_norm(const ModelSpec& m, const SpinBasisState& a,
                                          const SpinBasisState& b) {
    check_length(m, a);
    check_length(m, b);
    return dynamic_norm_bits(m, a.bits, b.bits);
}

SpinBasisState initial_state(const ModelSpec& m, InitialStateKind kind,
                             std::uint64_t custom_bits) {
    switch (kind) {
        case InitialStateKind::domain_wall: {
            if (m.L % 2 != 0) throw invalid_input_error("domain_wall requires even L");
            // sites 1..L/2 up, rest down
            const std::uint64_t bits = (std::uint64_t{1} << (m.L / 2)) - 1;
            return make_state(bits, m.L);
        }
        case InitialStateKind::all_up:
            return make_state((std::uint64_t{1} << m.L) - 1, m.L);
        case InitialStateKind::custom:
            return make_state(custom_bits, m.L);
    }
    throw invalid_input_error("unknown initial state kind");
}

} // namespace tqmc
