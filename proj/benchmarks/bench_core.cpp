#include <benchmark/benchmark.h>

#include "tqmc/engine.hpp"
#include "tqmc/ensemble.hpp"
#include "tqmc/oracle.hpp"
#include "tqmc/stats.hpp"

using namespace tqmc;

static void BM_spawn_outcome(benchmark::State& state) {
    const ModelSpec m = make_xxz(12, 1.0, 0.9);
    const std::uint64_t ket = parse_state("uuuuuudddddd").bits;
    RunRng rng(7);
    for (auto _ : state) {
        const bool side = rng.coin();
        const int n_t = transition_count_bits(m, ket);
        const int pick = static_cast<int>(rng.pick(static_cast<std::uint64_t>(n_t)));
        benchmark::DoNotOptimize(
            spawn_outcome(m, ket, ket, 0, cplx(1.0), 2.0, 30.0, side, pick));
    }
}
BENCHMARK(BM_spawn_outcome);

// attempts per second through the fused main loop, the number that sets
// every production runtime
static void BM_main_loop(benchmark::State& state) {
    const ModelSpec m = make_xxz(static_cast<int>(state.range(0)), 1.0, 0.9);
    const SpinBasisState psi0 = initial_state(m, InitialStateKind::domain_wall);
    const SGrid grid = make_sgrid_spaced(0.1, 10.0, 5, true, 2);
    LoopSchedule sch;
    sch.r = 100.0;
    sch.m_trunc = 200;
    sch.w_u = 1e-6;
    const std::vector<ObservableSpec> obs{make_sigma_z(m, m.L / 2)};
    std::uint64_t seed = 1;
    for (auto _ : state) {
        RunRng rng(seed++);
        const RunResult res = run_simulation(m, psi0, grid, sch, obs, rng);
        std::uint64_t attempts = 0;
        for (const auto a : res.population_trace) attempts += a;
        state.counters["attempts/s"] = benchmark::Counter(
            static_cast<double>(attempts), benchmark::Counter::kIsIterationInvariantRate);
        benchmark::DoNotOptimize(res.per_loop_contributions.data());
    }
}
BENCHMARK(BM_main_loop)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_compress(benchmark::State& state) {
    RunRng gen(3);
    Ensemble proto;
    proto.s_grid = make_sgrid_spaced(0.1, 10.0, 5, true, 2);
    for (int i = 0; i < 4096; ++i) {
        Triplet t;
        t.ket = gen.next_u64() % 256;
        t.bra = gen.next_u64() % 256;
        t.norm = 1;
        t.w_ctrl = cplx(gen.uniform() - 0.5, gen.uniform() - 0.5);
        t.reweight.assign(5, cplx(1.0));
        proto.triplets.push_back(std::move(t));
    }
    for (auto _ : state) {
        Ensemble e = proto;
        compress(e);
        benchmark::DoNotOptimize(e.triplets.data());
    }
}
BENCHMARK(BM_compress)->Unit(benchmark::kMicrosecond);

static void BM_dense_resolvent(benchmark::State& state) {
    const ModelSpec m = make_xxz(static_cast<int>(state.range(0)), 1.0, 0.9);
    const DenseMatrix rho0 = basis_density(initial_state(m, InitialStateKind::domain_wall));
    for (auto _ : state) {
        benchmark::DoNotOptimize(dense_resolvent(m, rho0, 0.5));
    }
}
BENCHMARK(BM_dense_resolvent)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

static void BM_time_domain_step(benchmark::State& state) {
    const ModelSpec m = make_xxz(static_cast<int>(state.range(0)), 1.0, 0.9);
    const SpinBasisState psi0 = initial_state(m, InitialStateKind::domain_wall);
    const ObservableSpec obs = make_sigma_z(m, m.L / 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(time_domain_reference(m, psi0, obs, 10.0, 0.1));
    }
}
BENCHMARK(BM_time_domain_step)->Arg(10)->Arg(12)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
