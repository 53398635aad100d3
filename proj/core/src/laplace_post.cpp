#include "tqmc/laplace_post.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "tqmc/errors.hpp"

namespace tqmc {

namespace {

template <typename Scalar>
Scalar eval_poly(const std::vector<double>& coeff, Scalar z) {
    Scalar acc(0.0);
    for (auto it = coeff.rbegin(); it != coeff.rend(); ++it) acc = acc * z + Scalar(*it);
    return acc;
}

} // namespace

double RationalModel::evaluate(double s) const {
    const double z = s / s_scale;
    return eval_poly(num, z) / eval_poly(den, z);
}

std::complex<double> RationalModel::evaluate(std::complex<double> s) const {
    const std::complex<double> z = s / s_scale;
    return eval_poly(num, z) / eval_poly(den, z);
}

namespace {

struct FitAttempt {
    RationalModel model;
    bool stable = false;
};

// one Sanathanan-Koerner pass ladder at fixed order: linearized weighted
// least squares, weights 1/|D_prev|^2, iterated to a fixed point
FitAttempt fit_order(const std::vector<double>& z, const std::vector<double>& c, int order,
                     double data_scale, const std::vector<double>& warm_den) {
    const int n = static_cast<int>(z.size());
    const int n_num = order + 1;
    const int n_den = order; // d_0 = 1 fixed
    const int n_par = n_num + n_den;

    std::vector<double> den_prev = warm_den;
    den_prev.resize(static_cast<std::size_t>(order) + 1, 0.0);
    den_prev[0] = 1.0;

    FitAttempt out;
    Eigen::MatrixXd a(n, n_par);
    Eigen::VectorXd b(n);
    std::vector<double> num(n_num), den(static_cast<std::size_t>(n_den) + 1);

    for (int pass = 0; pass < 12; ++pass) {
        for (int i = 0; i < n; ++i) {
            const double dmag = std::abs(eval_poly(den_prev, z[i]));
            const double wt = 1.0 / std::max(dmag, 1e-12);
            double zp = 1.0;
            for (int k = 0; k < n_num; ++k) {
                a(i, k) = wt * zp;
                zp *= z[i];
            }
            zp = z[i];
            for (int k = 0; k < n_den; ++k) {
                a(i, n_num + k) = -wt * c[i] * zp;
                zp *= z[i];
            }
            b(i) = wt * c[i];
        }
        const Eigen::VectorXd x = a.colPivHouseholderQr().solve(b);
        for (int k = 0; k < n_num; ++k) num[static_cast<std::size_t>(k)] = x(k);
        den[0] = 1.0;
        for (int k = 0; k < n_den; ++k) den[static_cast<std::size_t>(k) + 1] = x(n_num + k);
        den_prev = den;
    }

    out.model.num = num;
    out.model.den = den;
    out.model.order_p = order;
    out.model.order_q = order;

    // stability: bounded parameters and a denominator that stays away from
    // zero on the data interval
    double pmax = 0.0;
    for (const double v : num) pmax = std::max(pmax, std::abs(v));
    for (const double v : den) pmax = std::max(pmax, std::abs(v));
    bool ok = pmax <= 1e6 * std::max(1.0, data_scale);
    double rss = 0.0;
    for (int i = 0; i < n; ++i) {
        const double dv = eval_poly(den, z[i]);
        if (std::abs(dv) < 1e-9) {
            ok = false;
            break;
        }
        const double e = eval_poly(num, z[i]) / dv - c[i];
        rss += e * e;
    }
    out.model.residual = std::sqrt(rss / n);
    out.stable = ok && std::isfinite(out.model.residual);
    return out;
}

} // namespace

RationalModel rational_fit(const std::vector<double>& s_values,
                           const std::vector<double>& c_values, int start_order,
                           int max_order) {
    const int n = static_cast<int>(s_values.size());
    if (n != static_cast<int>(c_values.size()))
        throw invalid_input_error("rational_fit: s and C lengths differ");
    if (start_order < 1 || max_order < start_order)
        throw invalid_input_error("rational_fit: bad order range");
    if (n < 2 * (max_order + 1))
        max_order = std::max(start_order, n / 2 - 1);
    if (n < 2 * (start_order + 1))
        throw invalid_input_error("rational_fit: need at least 2*(order+1) data points");
    for (int i = 0; i < n; ++i) {
        if (!(s_values[i] > 0.0))
            throw invalid_input_error("rational_fit: s values must be positive");
        if (i > 0 && s_values[i] == s_values[i - 1])
            throw invalid_input_error("rational_fit: s values must be distinct");
    }

    const double s_scale =
        std::sqrt(*std::min_element(s_values.begin(), s_values.end()) *
                  *std::max_element(s_values.begin(), s_values.end()));
    std::vector<double> z(s_values.size());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = s_values[i] / s_scale;
    double data_scale = 0.0;
    for (const double v : c_values) data_scale = std::max(data_scale, std::abs(v));

    FitAttempt best = fit_order(z, c_values, start_order, data_scale, {1.0});
    best.model.s_scale = s_scale;
    if (!best.stable)
        throw fit_failure_error("rational_fit: no stable fit at the starting order "
                                "(rms residual " +
                                std::to_string(best.model.residual) + ")");

    for (int order = start_order + 1; order <= max_order; ++order) {
        if (2 * (order + 1) > n) break;
        FitAttempt next = fit_order(z, c_values, order, data_scale, best.model.den);
        next.model.s_scale = s_scale;
        if (!next.stable || next.model.residual > best.model.residual) break;
        best = next;
    }

    // a model that leaves most of the signal unexplained is useless downstream
    double rms = 0.0;
    for (const double v : c_values) rms += v * v;
    rms = std::sqrt(rms / n);
    if (best.model.residual > 0.5 * rms)
        throw fit_failure_error("rational_fit: no acceptable fit up to order " +
                                std::to_string(best.model.order_p) + " (rms residual " +
                                std::to_string(best.model.residual) + " against data rms " +
                                std::to_string(rms) + ")");
    return best.model;
}

namespace {

struct ZakianPair {
    std::complex<double> alpha;
    std::complex<double> k;
};

// standard published 5-term tabulation
constexpr std::size_t n_zakian = 5;
const ZakianPair zakian_table[n_zakian] = {
    {{12.83767675, 1.666063445}, {-36902.08210, 196990.4257}},
    {{12.22613209, 5.012718792}, {61277.02524, -95408.62551}},
    {{10.93430308, 8.409673116}, {-28916.56288, 18169.18531}},
    {{8.776434715, 11.92185389}, {4655.361138, -1.901528642}},
    {{5.225453361, 15.72952905}, {-118.7414011, -141.3036911}},
};

double zakian_raw(const std::function<std::complex<double>(std::complex<double>)>& f,
                  double t) {
    double acc = 0.0;
    for (const auto& p : zakian_table) acc += (p.k * f(p.alpha / t)).real();
    return 2.0 * acc / t;
}

// guard against constant-table transcription errors: 1/s must invert to 1
bool validate_zakian_table() {
    const auto one_over_s = [](std::complex<double> s) { return 1.0 / s; };
    for (const double t : {0.1, 1.0, 10.0})
        if (std::abs(zakian_raw(one_over_s, t) - 1.0) > 1e-6) return false;
    return true;
}

} // namespace

double zakian_invert(const std::function<std::complex<double>(std::complex<double>)>& f,
                     double t) {
    if (!(t > 0.0)) throw invalid_input_error("zakian_invert: t must be positive");
    static const bool table_ok = validate_zakian_table();
    if (!table_ok) throw contract_violation("zakian_invert: constant table failed the 1/s "
                                            "round-trip validation");
    return zakian_raw(f, t);
}

LogDerivativePeak log_derivative_peak(const std::vector<double>& s_values,
                                      const std::vector<double>& c_values) {
    const std::size_t n = s_values.size();
    if (n != c_values.size())
        throw invalid_input_error("log_derivative_peak: s and C lengths differ");
    if (n < 8) throw invalid_input_error("log_derivative_peak: need at least 8 points");

    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(s_values[i] > 0.0))
            throw invalid_input_error("log_derivative_peak: s values must be positive");
        if (i > 0 && s_values[i] <= s_values[i - 1])
            throw invalid_input_error("log_derivative_peak: s values must be ascending");
        if (c_values[i] == 0.0)
            throw invalid_input_error("log_derivative_peak: zero-magnitude sample");
        x[i] = std::log(s_values[i]);
        y[i] = std::log(std::abs(c_values[i]));
    }

    // natural cubic spline: solve the tridiagonal system for the knot
    // second derivatives m
    std::vector<double> h(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) h[i] = x[i + 1] - x[i];
    std::vector<double> diag(n, 2.0), upper(n, 0.0), rhs(n, 0.0), m(n, 0.0);
    // interior equations scaled per row; natural ends m_0 = m_{n-1} = 0
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double hi = h[i - 1], hi1 = h[i];
        diag[i] = 2.0 * (hi + hi1);
        rhs[i] = 6.0 * ((y[i + 1] - y[i]) / hi1 - (y[i] - y[i - 1]) / hi);
    }
    // Thomas algorithm on the interior block
    for (std::size_t i = 1; i + 1 < n; ++i) upper[i] = h[i];
    std::vector<double> lower(n, 0.0);
    for (std::size_t i = 2; i + 1 < n; ++i) lower[i] = h[i - 1];
    for (std::size_t i = 2; i + 1 < n; ++i) {
        const double f = lower[i] / diag[i - 1];
        diag[i] -= f * upper[i - 1];
        rhs[i] -= f * rhs[i - 1];
    }
    for (std::size_t ii = n - 2; ii >= 1; --ii) {
        m[ii] = (rhs[ii] - upper[ii] * (ii + 2 < n ? m[ii + 1] : 0.0)) / diag[ii];
        if (ii == 1) break;
    }

    const auto derivative_at = [&](double xx) {
        std::size_t i = 0;
        while (i + 2 < n && xx > x[i + 1]) ++i;
        const double hi = h[i];
        const double a = (x[i + 1] - xx) / hi, b = (xx - x[i]) / hi;
        return (y[i + 1] - y[i]) / hi - (3.0 * a * a - 1.0) * hi * m[i] / 6.0 +
               (3.0 * b * b - 1.0) * hi * m[i + 1] / 6.0;
    };

    LogDerivativePeak out;
    const std::size_t n_ref = 10 * n;
    out.grid.resize(n_ref);
    out.derivative.resize(n_ref);
    for (std::size_t k = 0; k < n_ref; ++k) {
        const double xx =
            x[0] + (x[n - 1] - x[0]) * static_cast<double>(k) / static_cast<double>(n_ref - 1);
        out.grid[k] = std::exp(xx);
        out.derivative[k] = derivative_at(xx);
    }

    double best_mag = -1.0;
    for (std::size_t k = 1; k + 1 < n_ref; ++k) {
        const double dl = out.derivative[k] - out.derivative[k - 1];
        const double dr = out.derivative[k + 1] - out.derivative[k];
        const bool extremal = dl * dr <= 0.0 && (dl != 0.0 || dr != 0.0);
        if (!extremal) continue;
        const double mag = std::abs(out.derivative[k]);
        if (mag > best_mag) {
            best_mag = mag;
            out.s_star = out.grid[k];
            out.peak_value = out.derivative[k];
        }
    }
    return out;
}

double amplitude_estimate(const std::vector<double>& s_values,
                          const std::vector<double>& c_values, const RationalModel& model) {
    if (model.num.empty() || model.den.empty())
        throw invalid_input_error("amplitude_estimate: empty model");
    if (s_values.size() != c_values.size())
        throw invalid_input_error("amplitude_estimate: s and C lengths differ");
    for (const double s : s_values)
        if (std::abs(eval_poly(model.den, s / model.s_scale)) < 1e-9)
            throw invalid_input_error("amplitude_estimate: denominator vanishes on the data "
                                      "interval");

    if (model.den[0] == 0.0)
        throw undefined_limit_error("amplitude_estimate: no finite s -> 0 limit");
    const double low = model.num[0] / model.den[0];

    const int p = static_cast<int>(model.num.size()) - 1;
    const int q = static_cast<int>(model.den.size()) - 1;
    // trailing coefficients decide the s -> inf behaviour; fitted models carry
    // roundoff-sized trailing entries, so trim relative to the coefficient scale
    double scale = 0.0;
    for (const double c : model.num) scale = std::max(scale, std::abs(c));
    for (const double c : model.den) scale = std::max(scale, std::abs(c));
    const double trim_tol = 1e-9 * scale;
    int pe = p, qe = q;
    while (pe > 0 && std::abs(model.num[static_cast<std::size_t>(pe)]) <= trim_tol) --pe;
    while (qe > 0 && std::abs(model.den[static_cast<std::size_t>(qe)]) <= trim_tol) --qe;
    double high = 0.0;
    if (pe > qe)
        throw undefined_limit_error("amplitude_estimate: numerator degree exceeds denominator "
                                    "degree, no s -> inf limit");
    if (pe == qe)
        high = model.num[static_cast<std::size_t>(pe)] / model.den[static_cast<std::size_t>(qe)];
    return std::abs(low - high);
}

} // namespace tqmc
