// Acceptance gate: each numbered check prints exactly one PASS/FAIL line and
// sets the exit status. Run as `tqmc_acceptance <n>` with n in 1..10.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "tqmc/config.hpp"
#include "tqmc/engine.hpp"
#include "tqmc/ensemble.hpp"
#include "tqmc/laplace_post.hpp"
#include "tqmc/model.hpp"
#include "tqmc/observable.hpp"
#include "tqmc/oracle.hpp"
#include "tqmc/rng.hpp"
#include "tqmc/runner.hpp"
#include "tqmc/stats.hpp"

using namespace tqmc;
namespace fs = std::filesystem;

namespace {

const cplx I(0.0, 1.0);

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t k = 0; k < n; ++k)
        v[k] = lo * std::pow(hi / lo, double(k) / double(n - 1));
    return v;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------- check 1

bool check_trace_identity(std::string& detail) {
    double worst = 0.0;
    for (const ModelSpec& m : {make_xxz(4, 1.0, 0.9), make_ising(4, 1.0, 0.2, 0.6)}) {
        const DenseMatrix rho0 = basis_density(initial_state(m, InitialStateKind::domain_wall));
        for (const double s : {0.05, 0.5, 5.0}) {
            const DenseMatrix x = dense_resolvent(m, rho0, s);
            worst = std::max(worst, std::abs(x.trace() - 1.0));
        }
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "max |trace - 1| = %.2e (tolerance 1e-10)", worst);
    detail = buf;
    return worst <= 1e-10;
}

// ---------------------------------------------------------------- check 2

// relative error curve of the truncated series against the exact resolvent,
// sampled at checkpoints, accumulated incrementally
std::vector<std::pair<std::uint64_t, double>>
series_error_curve(const ModelSpec& m, const DenseMatrix& rho0, double s, double r,
                   std::uint64_t m_max, std::uint64_t stride) {
    const DenseMatrix exact = dense_resolvent(m, rho0, s);
    const double scale = exact.norm();
    DenseMatrix term = apply_free_resolvent(m, rho0, s + r);
    DenseMatrix acc = s * term;
    std::vector<std::pair<std::uint64_t, double>> curve;
    for (std::uint64_t k = 1; k <= m_max; ++k) {
        term = apply_transfer(m, term, s, r);
        acc += s * term;
        if (k % stride == 0 || k == m_max)
            curve.emplace_back(k, (acc - exact).norm() / scale);
    }
    return curve;
}

bool check_series_convergence(std::string& detail) {
    const ModelSpec m = make_xxz(4, 1.0, 0.9);
    const DenseMatrix rho0 = basis_density(parse_state("udud"));
    const double s = 0.5;

    // convergent step rate: error drops below 1e-3 and keeps shrinking
    const auto conv = series_error_curve(m, rho0, s, 300.0, 6000, 200);
    double final_err = conv.back().second;
    std::size_t first_ok = conv.size();
    for (std::size_t k = 0; k < conv.size(); ++k)
        if (conv[k].second < 1e-3) {
            first_ok = k;
            break;
        }
    bool monotone = first_ok < conv.size();
    for (std::size_t k = first_ok; monotone && k + 1 < conv.size(); ++k)
        if (conv[k + 1].second > conv[k].second * (1.0 + 1e-9)) monotone = false;

    // at the fast step rate the series provably diverges; the error floor
    // and the subsequent growth are fixed properties of the scheme
    const auto divg = series_error_curve(m, rho0, s, 30.0, 400, 1);
    double floor = divg.front().second;
    for (const auto& [k, e] : divg) floor = std::min(floor, e);
    const double tail = divg.back().second;

    char buf[192];
    std::snprintf(buf, sizeof buf,
                  "r=300: err %.2e at M=6000, non-increasing past M=%llu; "
                  "r=30: floor %.3f, err(400) %.2f",
                  final_err,
                  static_cast<unsigned long long>(first_ok < conv.size()
                                                      ? conv[first_ok].first
                                                      : 0),
                  floor, tail);
    detail = buf;
    return final_err < 1e-3 && monotone && floor > 0.1 && tail > 2.0 * floor;
}

// ---------------------------------------------------------------- check 3

bool check_one_loop_enumeration(std::string& detail) {
    const double s = 0.5, r = 30.0;
    double worst = 0.0;
    for (const ModelSpec& m : {make_xxz(3, 1.0, 0.9), make_ising(3, 1.0, 0.2, 0.6)}) {
        for (const double kappa : {0.0, 2.0}) {
            const std::uint64_t dim = std::uint64_t{1} << m.L;
            for (std::uint64_t i = 0; i < dim; ++i) {
                for (std::uint64_t j = 0; j < dim; ++j) {
                    const auto n_ij = dynamic_norm_bits(m, i, j);
                    // cross-sector pairs never occur in runs started from a
                    // diagonal state and carry no dynamic norm
                    if (!n_ij) continue;
                    const double nij = static_cast<double>(*n_ij);
                    const cplx w_parent = std::exp(-0.5 * kappa * nij * nij);

                    struct Node {
                        std::uint64_t ket, bra;
                        std::uint32_t norm;
                        cplx w;
                    };
                    std::vector<Node> nodes{{i, j, *n_ij, w_parent}};
                    for (const bool ket_side : {true, false}) {
                        const int n_t = transition_count_bits(m, ket_side ? i : j);
                        for (int pick = 0; pick < n_t; ++pick) {
                            const auto out = spawn_outcome(m, i, j, *n_ij, w_parent, kappa, r,
                                                           ket_side, pick);
                            if (!out) continue;
                            // side coin 1/2 times uniform pick 1/n_t
                            nodes.push_back(
                                {out->ket, out->bra, out->norm, out->w_ctrl * 0.5 / double(n_t)});
                        }
                    }

                    DenseMatrix engine_side =
                        DenseMatrix::Zero(Eigen::Index(dim), Eigen::Index(dim));
                    for (const auto& n : nodes) {
                        const double de =
                            free_energy_bits(m, n.ket) - free_energy_bits(m, n.bra);
                        const cplx g = r / cplx(s + r, de);
                        const double nn = static_cast<double>(n.norm);
                        engine_side(Eigen::Index(n.ket), Eigen::Index(n.bra)) +=
                            n.w * g * std::exp(0.5 * kappa * nn * nn);
                    }

                    DenseMatrix rho = DenseMatrix::Zero(Eigen::Index(dim), Eigen::Index(dim));
                    rho(Eigen::Index(i), Eigen::Index(j)) = 1.0;
                    const DenseMatrix dense_side = apply_transfer(m, rho, s, r);
                    worst = std::max(worst,
                                     (engine_side - dense_side).cwiseAbs().maxCoeff());
                }
            }
        }
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "max entry deviation %.2e (tolerance 1e-12)", worst);
    detail = buf;
    return worst <= 1e-12;
}

// ---------------------------------------------------------------- check 4

struct McBatch {
    std::size_t first, count; // range inside the global s grid
    double r;
    std::uint64_t m_trunc;
};

bool check_mc_vs_dense(std::string& detail) {
    const ModelSpec m = make_xxz(6, 1.0, 0.9);
    const SpinBasisState psi0 = initial_state(m, InitialStateKind::domain_wall);
    const std::vector<double> s_all = log_grid(0.1, 10.0, 20);
    const ObservableSpec obs = make_sigma_z(m, 3);

    // the spectral threshold of the transfer step scales like 1/s, so the
    // grid is covered in four batches with step rates that keep the series
    // in its decaying regime and truncation depths whose deterministic bias
    // stays below ~5e-4, under the statistical resolution of 30 runs
    const std::vector<McBatch> batches{
        {0, 5, 300.0, 14000},
        {5, 5, 300.0, 6600},
        {10, 5, 100.0, 1000},
        {15, 5, 40.0, 140},
    };
    const int n_runs = 30;
    const std::uint64_t master_seed = 401;
    const double target_pop = 1.0e4;

    std::size_t hits = 0;
    double worst_pull = 0.0;
    for (const auto& batch : batches) {
        const std::vector<double> s_vals(s_all.begin() + batch.first,
                                         s_all.begin() + batch.first + batch.count);
        const SGrid grid = make_sgrid(s_vals, batch.count / 2);
        LoopSchedule sch;
        sch.r = batch.r;
        sch.m_trunc = batch.m_trunc;
        sch.w_u = 1.0 / ((grid.ref() + batch.r) * target_pop);

        std::vector<FinalizedRun> runs;
        for (int i = 0; i < n_runs; ++i) {
            RunRng rng(run_seed(master_seed + batch.first, static_cast<std::uint64_t>(i)));
            runs.push_back(finalize_run(run_simulation(m, psi0, grid, sch, {obs}, rng)));
        }
        const AggregateResult agg = aggregate(runs);

        for (std::size_t k = 0; k < batch.count; ++k) {
            const DenseMatrix exact =
                dense_resolvent(m, basis_density(psi0), s_vals[k]);
            const double reference = trace_with(obs, exact).real();
            const double pull =
                std::abs(agg.mean[0][k].real() - reference) / agg.stderr_[0][k].real();
            worst_pull = std::max(worst_pull, pull);
            if (pull <= 3.0) ++hits;
        }
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "%zu/20 points within 3 sigma (need >= 18), worst pull %.2f",
                  hits, worst_pull);
    detail = buf;
    return hits >= 18;
}

// ---------------------------------------------------------------- check 5

bool check_trace_conservation(std::string& detail) {
    const ModelSpec m = make_xxz(8, 1.0, 0.9);
    const SpinBasisState psi0 = initial_state(m, InitialStateKind::domain_wall);
    // reference at the smallest grid point: components above the reference
    // have contracting reweights, so every checked estimate stays clean while
    // the stderr still fans out toward small s
    const SGrid grid = make_sgrid(log_grid(0.2, 10.0, 5), 0);
    LoopSchedule sch;
    sch.r = 700.0;
    sch.m_trunc = 14000;
    sch.kappa = 2.0;
    sch.w_u = 1.0 / ((grid.ref() + sch.r) * 2000.0);
    sch.u_dw = sch.w_u;
    sch.dw_enable_loop = 2800; // 4 units of 1/r time into the run
    const std::vector<ObservableSpec> obs{make_total_trace(m)};

    const int n_runs = 16;
    std::vector<FinalizedRun> runs;
    for (int i = 0; i < n_runs; ++i) {
        RunRng rng(run_seed(501, static_cast<std::uint64_t>(i)));
        runs.push_back(finalize_run(run_simulation(m, psi0, grid, sch, obs, rng)));
    }
    const AggregateResult agg = aggregate(runs);

    bool within = true;
    double worst_pull = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (grid.values[k] < 0.2) continue;
        const double pull = std::abs(agg.mean[0][k].real() - 1.0) / agg.stderr_[0][k].real();
        worst_pull = std::max(worst_pull, pull);
        if (pull > 3.0) within = false;
    }
    bool monotone = true;
    for (std::size_t k = 0; k + 1 < grid.size(); ++k)
        if (agg.stderr_[0][k].real() < agg.stderr_[0][k + 1].real()) monotone = false;

    char buf[192];
    std::snprintf(buf, sizeof buf,
                  "worst |trace-1| pull %.2f sigma for s >= 0.2; stderr spans %.1e..%.1e %s",
                  worst_pull, agg.stderr_[0][grid.size() - 1].real(),
                  agg.stderr_[0][0].real(),
                  monotone ? "and grows monotonically toward small s" : "NOT monotone");
    detail = buf;
    return within && monotone;
}

// ---------------------------------------------------------------- check 6

struct TransportSide {
    double deviation = 0.0;     // mean |C - initial sign| over the outer sites
    double oracle_gap = 0.0;    // worst |C_mc - C_oracle| in combined error units
};

TransportSide transport_side(double J_z, std::uint64_t seed, int n_runs) {
    const ModelSpec m = make_xxz(12, 1.0, J_z);
    const SpinBasisState psi0 = initial_state(m, InitialStateKind::domain_wall);
    const double s = 0.1;
    const SGrid grid = make_sgrid({s}, 0);
    const std::vector<int> sites{1, 2, 3, 10, 11, 12};

    std::vector<ObservableSpec> obs;
    for (const int site : sites) obs.push_back(make_sigma_z(m, site));

    LoopSchedule sch;
    sch.r = 30.0;
    sch.m_trunc = 2400;
    sch.kappa = 2.0;
    sch.w_u = 4.0e-6;
    sch.u_dw = 4.0e-6;
    sch.dw_enable_loop = 60;

    std::vector<FinalizedRun> runs;
    for (int i = 0; i < n_runs; ++i) {
        RunRng rng(run_seed(seed, static_cast<std::uint64_t>(i)));
        runs.push_back(finalize_run(run_simulation(m, psi0, grid, sch, obs, rng)));
    }
    const AggregateResult agg = aggregate(runs);

    // time-domain oracle for the same quantities
    const auto series = time_domain_reference(m, psi0, obs, 400.0, 0.1);

    TransportSide out;
    for (std::size_t k = 0; k < sites.size(); ++k) {
        const double sign = spin_at(psi0.bits, sites[k] - 1);
        const double mc = agg.mean[k][0].real();
        const double err = agg.stderr_[k][0].real();
        const QuadratureResult q = laplace_quadrature(series[k], s);
        out.deviation += std::abs(mc - sign) / double(sites.size());
        const double combined = 3.0 * err + q.tail_bound;
        out.oracle_gap = std::max(out.oracle_gap, std::abs(mc - q.value) / combined);
    }
    return out;
}

bool check_transport_contrast(std::string& detail) {
    const TransportSide ballistic = transport_side(0.6, 601, 8);
    const TransportSide frozen = transport_side(1.5, 602, 8);
    const double ratio = ballistic.deviation / frozen.deviation;
    char buf[192];
    std::snprintf(buf, sizeof buf,
                  "outer-site deviation %.3f (J_z=0.6) vs %.3f (J_z=1.5), ratio %.1f "
                  "(need >= 5); oracle gaps %.2f / %.2f combined-error units",
                  ballistic.deviation, frozen.deviation, ratio, ballistic.oracle_gap,
                  frozen.oracle_gap);
    detail = buf;
    return ratio >= 5.0 && ballistic.oracle_gap <= 1.0 && frozen.oracle_gap <= 1.0;
}

// ---------------------------------------------------------------- check 7

double dominant_frequency(const TimeSeries& series) {
    double mean = 0.0;
    for (const double v : series.values) mean += v;
    mean /= double(series.values.size());
    const double t_total = series.dt * double(series.values.size() - 1);
    double best_w = 0.0, best_mag = -1.0;
    for (double w = 4.0 * 2.0 * M_PI / t_total; w <= 5.0; w += 0.002) {
        cplx acc = 0.0;
        for (std::size_t k = 0; k < series.values.size(); ++k)
            acc += (series.values[k] - mean) *
                   std::exp(-I * w * (series.dt * double(k)));
        const double mag = std::abs(acc);
        if (mag > best_mag) {
            best_mag = mag;
            best_w = w;
        }
    }
    return best_w;
}

struct ConfinementSide {
    double s_star = 0.0;
    double omega = 0.0;
    double worst_pull = 0.0; // MC vs oracle Laplace curve
};

ConfinementSide confinement_side(double h_z, std::uint64_t seed, int n_runs) {
    const ModelSpec m = make_ising(12, 1.0, 0.2, h_z);
    const SpinBasisState psi0 = initial_state(m, InitialStateKind::domain_wall);
    const ObservableSpec obs = make_sigma_z(m, 6);
    const std::vector<double> s_vals = log_grid(0.2, 10.0, 24);

    const TimeSeries series = time_domain_reference(m, psi0, obs, 250.0, 0.05);

    std::vector<double> oracle_curve;
    oracle_curve.reserve(s_vals.size());
    for (const double s : s_vals) oracle_curve.push_back(laplace_quadrature(series, s).value);

    ConfinementSide out;
    const LogDerivativePeak peak = log_derivative_peak(s_vals, oracle_curve);
    out.s_star = peak.s_star.value_or(0.0);
    out.omega = dominant_frequency(series);

    // Monte Carlo reproduction of the same curve
    const SGrid grid = make_sgrid(s_vals, 12);
    LoopSchedule sch;
    sch.r = 30.0;
    sch.m_trunc = 1100;
    sch.kappa = 2.0;
    sch.w_u = 2.0e-5;
    sch.u_dw = 2.0e-5;
    sch.dw_enable_loop = 60;
    std::vector<FinalizedRun> runs;
    for (int i = 0; i < n_runs; ++i) {
        RunRng rng(run_seed(seed, static_cast<std::uint64_t>(i)));
        runs.push_back(finalize_run(run_simulation(m, psi0, grid, sch, {obs}, rng)));
    }
    const AggregateResult agg = aggregate(runs);
    for (std::size_t k = 0; k < s_vals.size(); ++k) {
        const double pull =
            std::abs(agg.mean[0][k].real() - oracle_curve[k]) / agg.stderr_[0][k].real();
        out.worst_pull = std::max(out.worst_pull, pull);
    }
    return out;
}

bool check_confinement_scaling(std::string& detail) {
    const ConfinementSide lo = confinement_side(0.6, 701, 8);
    const ConfinementSide hi = confinement_side(1.2, 702, 8);
    const bool lo_ok = lo.s_star > 0 && std::abs(lo.s_star - lo.omega) <= 0.2 * lo.omega;
    const bool hi_ok = hi.s_star > 0 && std::abs(hi.s_star - hi.omega) <= 0.2 * hi.omega;
    const double ratio = hi.s_star / lo.s_star;
    const bool ratio_ok = std::abs(ratio - 2.0) <= 0.25 * 2.0;
    const bool mc_ok = lo.worst_pull <= 3.0 && hi.worst_pull <= 3.0;
    char buf[224];
    std::snprintf(buf, sizeof buf,
                  "peaks %.3f/%.3f vs Fourier %.3f/%.3f, ratio %.2f (need 2 +- 25%%); "
                  "MC worst pulls %.2f / %.2f sigma",
                  lo.s_star, hi.s_star, lo.omega, hi.omega, ratio, lo.worst_pull,
                  hi.worst_pull);
    detail = buf;
    return lo_ok && hi_ok && ratio_ok && mc_ok;
}

// ---------------------------------------------------------------- check 8

bool check_inversion_round_trip(std::string& detail) {
    const auto damped = [](cplx z) { return (z + 0.1) / ((z + 0.1) * (z + 0.1) + 4.0); };
    double worst = 0.0;
    for (double t = 0.05; t <= 5.0 + 1e-9; t += 0.05) {
        const double got = zakian_invert(damped, t);
        worst = std::max(worst, std::abs(got - std::exp(-0.1 * t) * std::cos(2.0 * t)));
    }
    const auto one_over_s = [](cplx z) { return 1.0 / z; };
    double worst_const = 0.0;
    for (const double t : {0.1, 1.0, 5.0, 10.0})
        worst_const = std::max(worst_const, std::abs(zakian_invert(one_over_s, t) - 1.0));

    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "damped cosine max err %.2e (<= 5e-2), step max err %.2e (<= 1e-6)", worst,
                  worst_const);
    detail = buf;
    return worst <= 5e-2 && worst_const <= 1e-6;
}

// ---------------------------------------------------------------- check 9

bool check_primitive_unbiasedness(std::string& detail) {
    const int trials = 100000;
    RunRng rng(901);
    const std::vector<cplx> rw{cplx(0.8, 0.1), cplx(1.0), cplx(1.4, -0.3)};

    // deactivate: survivors promoted to the threshold, mean preserved
    const double u_dw = 0.01;
    const cplx w_d = std::polar(0.004, 1.2);
    cplx mean_d = 0.0;
    for (int i = 0; i < trials; ++i) {
        Triplet t;
        t.w_ctrl = w_d;
        t.ket = 6;
        t.bra = 3;
        t.norm = 2;
        t.reweight = rw;
        if (deactivate(t, u_dw, rng) == DeactivateOutcome::survives_inactive)
            mean_d += t.w_ctrl;
    }
    mean_d /= double(trials);
    const double p = std::abs(w_d) / u_dw;
    const double sigma_d = u_dw * std::sqrt(p * (1.0 - p) / trials);
    const double pull_d = std::abs(mean_d - w_d) / sigma_d;

    // stochastic_decompress: unit children plus resolved rest
    const double w_u = 0.01;
    const cplx w_s = std::polar(0.0277, -0.4);
    cplx mean_s = 0.0;
    double sq_s = 0.0;
    for (int i = 0; i < trials; ++i) {
        Triplet t;
        t.w_ctrl = w_s;
        t.ket = 6;
        t.bra = 3;
        t.norm = 2;
        t.reweight = rw;
        cplx tot = 0.0;
        for (const auto& kid : stochastic_decompress(t, w_u, rng)) tot += kid.w_ctrl;
        mean_s += tot;
        sq_s += std::norm(tot - w_s);
    }
    mean_s /= double(trials);
    const double sigma_s = std::sqrt(sq_s / trials / trials);
    const double pull_s = std::abs(mean_s - w_s) / sigma_s;

    // compress: exact conservation of per-s physical class weights
    Ensemble e;
    e.s_grid = make_sgrid({0.3, 1.0, 4.0}, 1);
    RunRng gen(77);
    for (int i = 0; i < 500; ++i) {
        Triplet t;
        t.ket = gen.pick(4);
        t.bra = gen.pick(3);
        t.norm = static_cast<std::uint32_t>(t.ket + t.bra);
        t.w_ctrl = cplx(gen.uniform() - 0.5, gen.uniform() - 0.5);
        t.reweight = {cplx(gen.uniform(), gen.uniform()), cplx(1.0),
                      cplx(gen.uniform(), gen.uniform())};
        e.triplets.push_back(std::move(t));
    }
    std::vector<cplx> before(4 * 3 * 3, cplx(0.0)), after(4 * 3 * 3, cplx(0.0));
    for (const auto& t : e.triplets)
        for (std::size_t k = 0; k < 3; ++k)
            before[(t.ket * 3 + t.bra) * 3 + k] += t.w_ctrl * t.reweight[k];
    compress(e);
    for (const auto& t : e.triplets)
        for (std::size_t k = 0; k < 3; ++k)
            after[(t.ket * 3 + t.bra) * 3 + k] += t.w_ctrl * t.reweight[k];
    double worst_c = 0.0;
    for (std::size_t i = 0; i < before.size(); ++i)
        worst_c = std::max(worst_c, std::abs(before[i] - after[i]));

    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "deactivate pull %.2f sigma, decompress pull %.2f sigma (<= 4); "
                  "compress drift %.1e (<= 1e-12)",
                  pull_d, pull_s, worst_c);
    detail = buf;
    return pull_d <= 4.0 && pull_s <= 4.0 && worst_c <= 1e-12;
}

// ---------------------------------------------------------------- check 10

bool check_determinism(std::string& detail) {
#ifndef TQMC_CLI_PATH
    detail = "CLI path not wired in";
    return false;
#else
    const fs::path base = fs::temp_directory_path() / "tqmc_acceptance_determinism";
    fs::remove_all(base);
    fs::create_directories(base);

    RunConfig cfg;
    cfg.model = make_xxz(4, 1.0, 0.9);
    cfg.s_min = 0.2;
    cfg.s_max = 5.0;
    cfg.s_count = 6;
    cfg.s_ref_index = 3;
    cfg.schedule.r = 50.0;
    cfg.schedule.m_trunc = 500;
    cfg.schedule.w_u = 1e-5;
    cfg.run_count = 4;
    cfg.master_seed = 1001;
    cfg.observable_names = {"standard"};

    bool identical = true;
    std::string first_results, first_population;
    for (int pass = 0; pass < 2; ++pass) {
        const fs::path out = base / ("pass" + std::to_string(pass));
        cfg.output_path = out.string();
        const fs::path cfg_path = base / ("config" + std::to_string(pass) + ".json");
        std::ofstream(cfg_path) << effective_config_json(cfg);
        const std::string cmd =
            std::string(TQMC_CLI_PATH) + " run " + cfg_path.string() + " --workers 2";
        if (std::system(cmd.c_str()) != 0) {
            detail = "CLI invocation failed";
            return false;
        }
        const std::string results = slurp(out / "results.csv");
        const std::string population = slurp(out / "population.csv");
        if (pass == 0) {
            first_results = results;
            first_population = population;
        } else {
            // the echoed config differs only in output_path; compare data rows
            const auto strip = [](const std::string& text) {
                std::istringstream in(text);
                std::string line, kept;
                while (std::getline(in, line))
                    if (line.rfind("# config:", 0) != 0) kept += line + "\n";
                return kept;
            };
            identical = strip(results) == strip(first_results) &&
                        strip(population) == strip(first_population);
        }
    }
    fs::remove_all(base);
    detail = identical ? "two invocations produced byte-identical data rows"
                       : "reruns differ";
    return identical;
#endif
}

} // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::fprintf(stderr, "usage: %s <check 1..10>\n", argv[0]);
        return 2;
    }
    const int n = std::atoi(argv[1]);
    static const struct {
        const char* name;
        bool (*fn)(std::string&);
    } checks[] = {
        {"resolvent trace identity", check_trace_identity},
        {"truncated series convergence", check_series_convergence},
        {"one-loop enumeration equivalence", check_one_loop_enumeration},
        {"Monte Carlo vs dense reference", check_mc_vs_dense},
        {"trace conservation under full machinery", check_trace_conservation},
        {"transport contrast", check_transport_contrast},
        {"confinement frequency scaling", check_confinement_scaling},
        {"inversion round trip", check_inversion_round_trip},
        {"ensemble primitive unbiasedness", check_primitive_unbiasedness},
        {"determinism", check_determinism},
    };
    if (n < 1 || n > 10) {
        std::fprintf(stderr, "check number must be 1..10\n");
        return 2;
    }
    const auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
        ok = checks[n - 1].fn(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("acceptance %2d %s: %s [%s] (%.1f s)\n", n, ok ? "PASS" : "FAIL",
                checks[n - 1].name, detail.c_str(), secs);
    return ok ? 0 : 1;
}
