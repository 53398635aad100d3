#pragma once
#include <bit>
#include <cstdint>
#include <string>

#include "tqmc/errors.hpp"

namespace tqmc {

// Computational basis state of an L-site spin chain. Bit k (0-based) holds
// site k+1; bit value 1 means s^z = +1 (up), 0 means s^z = -1 (down).
struct SpinBasisState {
    std::uint64_t bits = 0;
    int L = 0;

    friend bool operator==(const SpinBasisState&, const SpinBasisState&) = default;
};

inline int spin_at(std::uint64_t bits, int site0) { return (bits >> site0) & 1u ? +1 : -1; }

inline int popcount64(std::uint64_t bits) { return std::popcount(bits); }

inline SpinBasisState make_state(std::uint64_t bits, int L) {
    if (L < 2 || L > 63) throw invalid_input_error("chain length must be in [2, 63]");
    if (L < 64 && (bits >> L) != 0) throw invalid_input_error("state has bits beyond site L");
    return SpinBasisState{bits, L};
}

// "udud..." rendering with site 1 first.
inline std::string to_string(const SpinBasisState& s) {
    std::string out;
    out.reserve(s.L);
    for (int k = 0; k < s.L; ++k) out.push_back((s.bits >> k) & 1u ? 'u' : 'd');
    return out;
}

// Parse "1" / "u" / "+" as up, "0" / "d" / "-" as down; site 1 first.
inline SpinBasisState parse_state(const std::string& text) {
    std::uint64_t bits = 0;
    int L = 0;
    for (char c : text) {
        bool up;
        if (c == '1' || c == 'u' || c == 'U' || c == '+') up = true;
        else if (c == '0' || c == 'd' || c == 'D' || c == '-') up = false;
        else throw invalid_input_error(std::string("bad spin character '") + c + "' in state string");
        if (up) bits |= (std::uint64_t{1} << L);
        ++L;
    }
    return make_state(bits, L);
}

} // namespace tqmc
