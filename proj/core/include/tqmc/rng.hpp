#pragma once
#include <cstdint>
#include <random>

namespace tqmc {

// splitmix64 step; used to derive independent per-run seeds from
// (master_seed, run_index) and to key the mt19937_64 engine.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Documented replica seeding: seed_i = splitmix64 stream keyed by
// master_seed, evaluated at position run_index.
inline std::uint64_t run_seed(std::uint64_t master_seed, std::uint64_t run_index) {
    std::uint64_t s = master_seed + run_index * 0xD1B54A32D192ED03ull;
    return splitmix64(s);
}

// Thin deterministic wrapper; mapping from raw 64-bit draws to doubles and
// bounded integers is spelled out here so output does not depend on the
// standard library's distribution implementations.
class RunRng {
  public:
    explicit RunRng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // uniform in [0, 1) with 53-bit resolution
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    bool coin() { return (eng_() >> 63) != 0; }

    // uniform integer in [0, n); n >= 1
    std::uint64_t pick(std::uint64_t n) {
        // rejection-free multiply-shift; bias is negligible for n << 2^64
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(eng_()) * n) >> 64);
    }

  private:
    std::mt19937_64 eng_;
};

} // namespace tqmc
