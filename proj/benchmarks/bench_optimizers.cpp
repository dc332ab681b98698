#include <benchmark/benchmark.h>

#include "uavinsar/ao_driver.hpp"
#include "uavinsar/opt_monotonic.hpp"
#include "uavinsar/opt_pso.hpp"
#include "uavinsar/opt_sca.hpp"

using namespace uavinsar;

namespace {

struct Setup {
    ScenarioConfig cfg;
    DerivedConstants dc;
    DecisionState state;
    Setup() {
        dc = derive_constants(cfg);
        AoOptions opts = AoOptions::from_config(cfg);
        opts.pso.population = 200;
        opts.pso.max_iterations = 50;
        state = repair_initial_state(cfg, dc, initial_state_f1(cfg), opts, 77);
    }
};

const Setup& setup() {
    static const Setup s;
    return s;
}

void BM_PsoStep(benchmark::State& state) {
    const Setup& s = setup();
    SlaveContext ctx = SlaveContext::make(s.cfg, s.dc, s.state.formation.master,
                                          s.state.resources.v_y, s.state.resources.p_com_2, {});
    PsoOptions opts = PsoOptions::from_config(s.cfg);
    opts.population = 200;
    opts.max_iterations = 50;
    SwarmState swarm = init_swarm(ctx, opts, 5);
    for (auto _ : state) {
        step_swarm(swarm, ctx, opts);
        benchmark::DoNotOptimize(swarm.gbest_fitness);
    }
}
BENCHMARK(BM_PsoStep);

void BM_PolyblockSolve(benchmark::State& state) {
    const Setup& s = setup();
    for (auto _ : state) {
        MasterContext ctx = MasterContext::make(s.cfg, s.dc, s.state.formation,
                                                s.state.resources.v_y, s.state.resources.p_com_1);
        benchmark::DoNotOptimize(
            optimize_master_altitude(ctx, s.cfg.eps_coverage, s.cfg.eps_bisection));
    }
}
BENCHMARK(BM_PolyblockSolve);

void BM_ScaSolve(benchmark::State& state) {
    const Setup& s = setup();
    const auto ctx = ScaContext::make(s.cfg, s.dc, s.state.formation);
    std::vector<double> v0(s.cfg.n_slots, 1.0);
    const auto u0 = induced_power_slack(v0, s.dc);
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_convex(build_subproblem(*ctx, v0, u0)));
    }
}
BENCHMARK(BM_ScaSolve);

void BM_AoIterationDeskScale(benchmark::State& state) {
    const Setup& s = setup();
    AoOptions opts = AoOptions::from_config(s.cfg);
    opts.pso.population = 200;
    opts.pso.max_iterations = 50;
    opts.psi = 0.4;
    opts.max_outer = 1;
    std::uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_ao(s.cfg, s.dc, opts, s.state, ++seed));
    }
}
BENCHMARK(BM_AoIterationDeskScale);

} // namespace
