#pragma once
#include <complex>
#include <functional>
#include <optional>
#include <vector>

namespace tqmc {

// Rational function N(z)/D(z) in the scaled variable z = s / s_scale,
// coefficients ascending, D normalized to D(0) = 1. Scaling keeps the
// least-squares columns comparable across orders.
struct RationalModel {
    std::vector<double> num;
    std::vector<double> den;
    int order_p = 0;
    int order_q = 0;
    double s_scale = 1.0;
    double residual = 0.0; // rms misfit on the training data

    double evaluate(double s) const;
    std::complex<double> evaluate(std::complex<double> s) const;
};

// Iteratively reweighted linear least squares per order, escalating
// (p, q) -> (p+1, q+1) warm-started from the previous optimum until the
// parameters diverge (magnitude > 1e6 x data scale), the denominator
// vanishes on the data interval, or the residual increases; returns the
// last stable model. Throws fit_failure_error if no stable fit exists at
// start_order.
RationalModel rational_fit(const std::vector<double>& s_values,
                           const std::vector<double>& c_values, int start_order = 2,
                           int max_order = 6);

// Five-term Zakian inverse Laplace transform; the constant table is
// validated against the 1/s -> 1 pair on first use.
double zakian_invert(const std::function<std::complex<double>(std::complex<double>)>& f,
                     double t);

struct LogDerivativePeak {
    std::optional<double> s_star;  // empty when the curve has no interior extremum
    double peak_value = 0.0;       // derivative value at s_star
    std::vector<double> grid;      // refined s sampling
    std::vector<double> derivative; // d log|C| / d log s on the refined grid
};

// Natural cubic spline of log|C| against log s; the reported location is the
// interior local extremum of the spline derivative with the largest
// magnitude, sampled on a 10x refined grid.
LogDerivativePeak log_derivative_peak(const std::vector<double>& s_values,
                                      const std::vector<double>& c_values);

// |F(s->0) - F(s->inf)| from the rational model's limiting values; the data
// arrays are the fit's training set, used to sanity-check the denominator.
double amplitude_estimate(const std::vector<double>& s_values,
                          const std::vector<double>& c_values, const RationalModel& model);

} // namespace tqmc
