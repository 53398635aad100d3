#pragma once
#include <cmath>
#include <cstddef>
#include <vector>

#include "tqmc/errors.hpp"

namespace tqmc {

// Strictly positive Laplace-variable grid with a designated reference point.
// Control weights live at values[ref_index]; every other grid point is
// reached through per-triplet reweight factors.
struct SGrid {
    std::vector<double> values;
    std::size_t ref_index = 0;

    double ref() const { return values[ref_index]; }
    std::size_t size() const { return values.size(); }
};

inline SGrid make_sgrid(std::vector<double> values, std::size_t ref_index) {
    if (values.empty()) throw invalid_config_error("s_grid must be nonempty");
    if (values.front() <= 0.0) throw invalid_config_error("s_grid values must be > 0");
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] <= values[i - 1])
            throw invalid_config_error("s_grid values must be strictly increasing");
    if (ref_index >= values.size()) throw invalid_config_error("s_grid ref index out of range");
    return SGrid{std::move(values), ref_index};
}

inline SGrid make_sgrid_spaced(double min, double max, std::size_t count, bool log_spacing,
                               std::size_t ref_index) {
    if (count == 0) throw invalid_config_error("s_grid count must be >= 1");
    if (min <= 0.0) throw invalid_config_error("s_grid min must be > 0");
    if (count > 1 && max <= min) throw invalid_config_error("s_grid max must exceed min");
    std::vector<double> v(count);
    for (std::size_t k = 0; k < count; ++k) {
        const double f = count == 1 ? 0.0 : static_cast<double>(k) / (count - 1);
        v[k] = log_spacing ? min * std::pow(max / min, f) : min + f * (max - min);
    }
    return make_sgrid(std::move(v), ref_index);
}

} // namespace tqmc
