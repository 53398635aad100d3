#include "tqmc/engine.hpp"

#include <bit>
#include <cmath>
#include <unordered_map>

#include "tqmc/errors.hpp"

namespace tqmc {

// walkers frozen by the deadweight threshold are kept until their weight has
// decayed this far below it, then resolved away to bound the pool size
constexpr double kDwPurgeRatio = 1.0 / 16.0;

void LoopSchedule::validate() const {
    if (!(r > 0.0)) throw invalid_config_error("schedule.r must be positive");
    if (m_trunc < 1) throw invalid_config_error("schedule.M_trunc must be >= 1");
    if (!(kappa >= 0.0)) throw invalid_config_error("schedule.kappa must be nonnegative");
    if (!(w_u > 0.0)) throw invalid_config_error("schedule.w_u must be positive");
    if (!(u_dw >= 0.0)) throw invalid_config_error("schedule.u_dw must be nonnegative");
    if (population_cap == 0)
        throw invalid_config_error("schedule.population_cap must be positive");
}

Ensemble init_ensemble(const ModelSpec& model, SpinBasisState psi0, const SGrid& grid) {
    if (psi0.L != model.L)
        throw invalid_input_error("init_ensemble: initial state length does not match model L");
    Ensemble e;
    e.s_grid = grid;
    Triplet t;
    t.w_ctrl = 1.0;
    t.ket = psi0.bits;
    t.bra = psi0.bits;
    t.norm = 0;
    t.reweight.assign(grid.size(), 1.0);
    e.triplets.push_back(std::move(t));
    return e;
}

void free_update(Ensemble& e, const ModelSpec& model, double r, FreeUpdateMode mode) {
    const auto& s = e.s_grid.values;
    const std::size_t ns = e.s_grid.size();
    const std::size_t ref = e.s_grid.ref_index;
    const double s_ref = s[ref];
    for (auto& t : e.triplets) {
        const double de = free_energy_bits(model, t.ket) - free_energy_bits(model, t.bra);
        const cplx den_ref(s_ref + r, de);
        t.w_ctrl *= (mode == FreeUpdateMode::loop ? r : 1.0) / den_ref;
        for (std::size_t k = 0; k < ns; ++k) {
            if (k == ref) continue; // ratio is identically 1 at the reference
            t.reweight[k] *= den_ref / cplx(s[k] + r, de);
        }
    }
}

std::optional<SpawnOutcome> spawn_outcome(const ModelSpec& model, std::uint64_t ket,
                                          std::uint64_t bra, std::uint32_t parent_norm,
                                          cplx w_child, double kappa, double r, bool ket_side,
                                          int pick_index) {
    const std::uint64_t src = ket_side ? ket : bra;
    const int n_t = transition_count_bits(model, src);
    if (n_t == 0) return std::nullopt;
    if (pick_index < 0 || pick_index >= n_t)
        throw invalid_input_error("spawn_outcome: transition index out of range");
    const Transition tr = transition_at_bits(model, src, pick_index);
    const std::uint64_t new_ket = ket_side ? tr.target : ket;
    const std::uint64_t new_bra = ket_side ? bra : tr.target;
    const auto norm = dynamic_norm_bits(model, new_ket, new_bra);
    if (!norm) throw contract_violation("spawn_outcome: target pair has no dynamic norm");
    double t_b = 1.0;
    if (kappa != 0.0) {
        const double ni = static_cast<double>(parent_norm);
        const double nk = static_cast<double>(*norm);
        t_b = std::exp(0.5 * kappa * (ni * ni - nk * nk));
    }
    // ket-side jumps carry -i, bra-side jumps +i; the factors 2 and n_t
    // compensate the side coin and the uniform target pick
    const cplx phase = ket_side ? cplx(0.0, -1.0) : cplx(0.0, 1.0);
    const cplx w = phase * (tr.amplitude / r) * w_child * (2.0 * n_t) * t_b;
    return SpawnOutcome{new_ket, new_bra, w, *norm};
}

std::uint64_t spawn_step(Ensemble& e, const ModelSpec& model, const LoopSchedule& schedule,
                         RunRng& rng) {
    schedule.validate();
    const std::size_t n0 = e.triplets.size();
    for (std::size_t idx = 0; idx < n0; ++idx) {
        const std::uint64_t ket = e.triplets[idx].ket;
        const std::uint64_t bra = e.triplets[idx].bra;
        const bool ket_side = rng.coin();
        const int n_t = transition_count_bits(model, ket_side ? ket : bra);
        if (n_t == 0) continue;
        const int pick = static_cast<int>(rng.pick(static_cast<std::uint64_t>(n_t)));
        const auto out = spawn_outcome(model, ket, bra, e.triplets[idx].norm,
                                       e.triplets[idx].w_ctrl, schedule.kappa, schedule.r,
                                       ket_side, pick);
        if (!out) continue;
        Triplet child;
        child.w_ctrl = out->w_ctrl;
        child.ket = out->ket;
        child.bra = out->bra;
        child.norm = out->norm;
        child.reweight = e.triplets[idx].reweight;
        e.triplets.push_back(std::move(child));
    }
    return n0;
}

namespace {

// Struct-of-arrays walker storage for the main loop; reweight vectors live
// in one flat pool of size count*ns with entry ref_index normalized to 1.
struct FlatEnsemble {
    std::vector<std::uint64_t> ket, bra;
    std::vector<std::uint32_t> norm;
    std::vector<cplx> w;
    std::vector<cplx> rw;

    std::size_t size() const { return w.size(); }
    void clear() {
        ket.clear();
        bra.clear();
        norm.clear();
        w.clear();
        rw.clear();
    }
};

// Accumulator over (ket, bra) classes. rw_sum[k] = sum_n w_n * reweight_n[k];
// the entry at ref_index is the class control-weight sum because every
// member's reweight is exactly 1 there.
struct ClassTable {
    std::unordered_map<std::uint64_t, std::uint32_t> index;
    std::vector<std::uint64_t> key;
    std::vector<std::uint32_t> norm;
    std::vector<cplx> pool;
    std::size_t ns = 0;

    static std::uint64_t pack(std::uint64_t ket, std::uint64_t bra) {
        return (ket << 32) | bra;
    }

    void begin_loop() {
        index.clear();
        key.clear();
        norm.clear();
        pool.clear();
    }

    cplx* slot(std::uint64_t ket, std::uint64_t bra, std::uint32_t n) {
        const std::uint64_t k = pack(ket, bra);
        const auto [it, inserted] = index.try_emplace(k, static_cast<std::uint32_t>(key.size()));
        if (inserted) {
            key.push_back(k);
            norm.push_back(n);
            pool.resize(pool.size() + ns, cplx(0.0));
        }
        return pool.data() + static_cast<std::size_t>(it->second) * ns;
    }

    std::size_t entries() const { return key.size(); }
};

// free-evolution factors g(s_ref) and g(s_k)/g(s_ref), cached per distinct
// energy difference (bit-exact key; the model produces identical doubles
// for identical integer bond/field counts)
struct FreeFactorCache {
    std::unordered_map<std::uint64_t, std::uint32_t> index;
    std::vector<cplx> g_ref;
    std::vector<cplx> ratio; // ns per entry

    std::uint32_t lookup(double de, double r, const std::vector<double>& s, std::size_t ref) {
        const std::uint64_t bits = std::bit_cast<std::uint64_t>(de);
        const auto [it, inserted] =
            index.try_emplace(bits, static_cast<std::uint32_t>(g_ref.size()));
        if (inserted) {
            const cplx den_ref(s[ref] + r, de);
            g_ref.push_back(r / den_ref);
            for (std::size_t k = 0; k < s.size(); ++k)
                ratio.push_back(k == ref ? cplx(1.0) : den_ref / cplx(s[k] + r, de));
        }
        return it->second;
    }
};

} // namespace

RunResult run_simulation(const ModelSpec& model, SpinBasisState psi0, const SGrid& grid,
                         const LoopSchedule& schedule,
                         const std::vector<ObservableSpec>& observables, RunRng& rng) {
    schedule.validate();
    if (psi0.L != model.L)
        throw invalid_input_error("run_simulation: initial state length does not match model L");
    if (model.L > 31)
        throw resource_limit_error("run_simulation: L > 31 exceeds the walker key width");
    if (observables.empty())
        throw invalid_input_error("run_simulation: need at least one observable");

    const std::size_t ns = grid.size();
    const std::size_t ref = grid.ref_index;
    const auto& s = grid.values;
    const std::size_t n_obs = observables.size();
    const double r = schedule.r;
    const bool dw_on = schedule.u_dw > 0.0;

    RunResult res;
    res.n_observables = n_obs;
    res.n_s = ns;
    res.m_trunc = schedule.m_trunc;
    res.per_loop_contributions.assign(schedule.m_trunc * n_obs * ns, cplx(0.0));
    res.population_trace.assign(schedule.m_trunc, 0);

    // exp(kappa n^2 / 2) per dynamic norm, grown on demand
    std::vector<double> bias_of_norm{1.0};
    const auto bias = [&](std::uint32_t n) -> double {
        while (bias_of_norm.size() <= n) {
            const double x = static_cast<double>(bias_of_norm.size());
            bias_of_norm.push_back(std::exp(0.5 * schedule.kappa * x * x));
        }
        return bias_of_norm[n];
    };

    FlatEnsemble cur;
    ClassTable table;
    table.ns = ns;
    FreeFactorCache ffc;
    // per-parent tally of (side, pick) outcomes; children of one parent can
    // only reach n_t(ket) + n_t(bra) distinct targets, so the table is
    // touched once per outcome instead of once per child
    std::vector<std::uint64_t> combo_count;

    const auto measure = [&](std::uint64_t m) {
        cplx* base = res.per_loop_contributions.data() + (m - 1) * n_obs * ns;
        for (std::size_t o = 0; o < n_obs; ++o) {
            const ObservableSpec& obs = observables[o];
            cplx* row = base + o * ns;
            for (std::size_t c = 0; c < cur.size(); ++c) {
                if (cur.ket[c] != cur.bra[c]) {
                    if (obs.diagonal_only) continue;
                    if (!obs.offdiag_masks.empty()) {
                        const std::uint64_t d = cur.ket[c] ^ cur.bra[c];
                        bool hit = false;
                        for (const auto msk : obs.offdiag_masks)
                            if (msk == d) {
                                hit = true;
                                break;
                            }
                        if (!hit) continue;
                    }
                }
                const cplx x = obs.eval(cur.bra[c], cur.ket[c]);
                if (x == cplx(0.0)) continue;
                const cplx wb = cur.w[c] * bias(cur.norm[c]) * x;
                const cplx* rw = cur.rw.data() + c * ns;
                for (std::size_t k = 0; k < ns; ++k) row[k] += s[k] * wb * rw[k];
            }
        }
    };

    const auto free_update_flat = [&](FreeUpdateMode mode) {
        for (std::size_t c = 0; c < cur.size(); ++c) {
            const double de =
                free_energy_bits(model, cur.ket[c]) - free_energy_bits(model, cur.bra[c]);
            cplx* rw = cur.rw.data() + c * ns;
            if (mode == FreeUpdateMode::initial) {
                const cplx den_ref(s[ref] + r, de);
                cur.w[c] *= 1.0 / den_ref;
                for (std::size_t k = 0; k < ns; ++k)
                    if (k != ref) rw[k] *= den_ref / cplx(s[k] + r, de);
            } else {
                const std::uint32_t ent = ffc.lookup(de, r, s, ref);
                cur.w[c] *= ffc.g_ref[ent];
                const cplx* ratio = ffc.ratio.data() + static_cast<std::size_t>(ent) * ns;
                for (std::size_t k = 0; k < ns; ++k) rw[k] *= ratio[k];
            }
        }
    };

    // loop m = 1: initial ensemble, trailing free resolvent, first measurement
    cur.ket.push_back(psi0.bits);
    cur.bra.push_back(psi0.bits);
    cur.norm.push_back(0);
    cur.w.push_back(1.0);
    cur.rw.assign(ns, cplx(1.0));
    free_update_flat(FreeUpdateMode::initial);
    measure(1);

    for (std::uint64_t m = 2; m <= schedule.m_trunc; ++m) {
        table.begin_loop();
        std::uint64_t attempts = 0;
        const bool dw_active = dw_on && m >= schedule.dw_enable_loop;

        for (std::size_t c = 0; c < cur.size(); ++c) {
            cplx w = cur.w[c];
            const cplx* rw = cur.rw.data() + c * ns;
            bool active = true;
            if (dw_active) {
                // judge against the largest weight component on the grid: a
                // class whose reference weight nearly cancelled can still carry
                // real weight elsewhere, and a decision made on the reference
                // modulus alone would hand that component an unbounded tail
                double mag = std::abs(w);
                for (std::size_t k = 0; k < ns; ++k)
                    mag = std::max(mag, std::abs(w) * std::abs(rw[k]));
                if (mag < schedule.u_dw) {
                    // below the threshold the walker keeps evolving freely and
                    // keeps being measured but no longer spawns; cutting the
                    // branching of these walkers is what stops the exponential
                    // population growth, at the price of a bias that shrinks
                    // with u_dw
                    active = false;
                    const double floor = schedule.u_dw * kDwPurgeRatio;
                    if (mag < floor) {
                        // prune the tail of the frozen pool so its size stays
                        // proportional to its weight; the resolution is the
                        // unbiased kill-or-promote of the ensemble primitives
                        if (mag == 0.0 || rng.uniform() >= mag / floor) {
                            ++res.kills;
                            continue;
                        }
                        w *= floor / mag;
                    }
                }
            }
            {
                cplx* acc = table.slot(cur.ket[c], cur.bra[c], cur.norm[c]);
                for (std::size_t k = 0; k < ns; ++k) acc[k] += w * rw[k];
            }
            if (!active) continue;

            const double ratio = std::abs(w) / schedule.w_u;
            std::uint64_t n_children = 1;
            if (ratio >= 2.0) {
                if (ratio >= 9.0e18)
                    throw resource_limit_error("run_simulation: walker split count overflow", m);
                n_children = static_cast<std::uint64_t>(ratio);
            }
            if (attempts + n_children > schedule.population_cap)
                throw resource_limit_error("run_simulation: population cap exceeded", m);
            attempts += n_children;
            const cplx w_child = w / static_cast<double>(n_children);

            const int n_t_ket = transition_count_bits(model, cur.ket[c]);
            const int n_t_bra = transition_count_bits(model, cur.bra[c]);
            const int n_combo = n_t_ket + n_t_bra;
            if (n_combo == 0) {
                // children still draw their side coin before finding no move
                for (std::uint64_t child = 0; child < n_children; ++child) rng.coin();
                continue;
            }
            combo_count.assign(static_cast<std::size_t>(n_combo), 0);
            for (std::uint64_t child = 0; child < n_children; ++child) {
                const bool ket_side = rng.coin();
                const int n_t = ket_side ? n_t_ket : n_t_bra;
                if (n_t == 0) continue;
                const std::size_t pick = rng.pick(static_cast<std::uint64_t>(n_t));
                ++combo_count[ket_side ? pick : static_cast<std::size_t>(n_t_ket) + pick];
            }
            for (int j = 0; j < n_combo; ++j) {
                if (combo_count[static_cast<std::size_t>(j)] == 0) continue;
                const bool ket_side = j < n_t_ket;
                const int pick = ket_side ? j : j - n_t_ket;
                const auto out = spawn_outcome(model, cur.ket[c], cur.bra[c], cur.norm[c],
                                               w_child, schedule.kappa, r, ket_side, pick);
                const cplx w_eff =
                    out->w_ctrl * static_cast<double>(combo_count[static_cast<std::size_t>(j)]);
                if (w_eff == cplx(0.0)) continue;
                cplx* acc = table.slot(out->ket, out->bra, out->norm);
                for (std::size_t k = 0; k < ns; ++k) acc[k] += w_eff * rw[k];
            }
        }

        if (table.entries() > schedule.population_cap)
            throw resource_limit_error("run_simulation: class count exceeds population cap", m);

        // merge back into walker storage, dropping exact cancellations
        cur.clear();
        for (std::size_t e = 0; e < table.entries(); ++e) {
            const cplx* acc = table.pool.data() + e * ns;
            const cplx wsum = acc[ref];
            if (wsum == cplx(0.0)) {
                ++res.cancellations;
                continue;
            }
            cur.ket.push_back(table.key[e] >> 32);
            cur.bra.push_back(table.key[e] & 0xFFFFFFFFull);
            cur.norm.push_back(table.norm[e]);
            cur.w.push_back(wsum);
            const std::size_t off = cur.rw.size();
            cur.rw.resize(off + ns);
            for (std::size_t k = 0; k < ns; ++k) cur.rw[off + k] = acc[k] / wsum;
            cur.rw[off + ref] = 1.0;
        }

        free_update_flat(FreeUpdateMode::loop);
        measure(m);
        res.population_trace[m - 1] = attempts;
    }
    return res;
}

} // namespace tqmc
