#include <benchmark/benchmark.h>

#include "uavinsar/constraints.hpp"
#include "uavinsar/insar_metrics.hpp"

using namespace uavinsar;

namespace {

const ScenarioConfig& config() {
    static const ScenarioConfig cfg;
    return cfg;
}

const DerivedConstants& derived() {
    static const DerivedConstants dc = derive_constants(config());
    return dc;
}

void BM_PhaseErrorPdf(benchmark::State& state) {
    const PhaseErrorModel model{0.512, 16, static_cast<int>(state.range(0))};
    for (auto _ : state) benchmark::DoNotOptimize(phase_error_pdf(model));
}
BENCHMARK(BM_PhaseErrorPdf)->Arg(1024)->Arg(4096);

void BM_DeltaPhi90(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(delta_phi_90(0.512, 16, 1e-6, 4096));
}
BENCHMARK(BM_DeltaPhi90);

void BM_PenaltyEvaluation(benchmark::State& state) {
    const ScenarioConfig& cfg = config();
    std::vector<double> v(cfg.n_slots, 2.0), p(cfg.n_slots, 6.0);
    SlaveContext ctx = SlaveContext::make(cfg, derived(), {-18.0, 38.0}, v, p, {});
    const AcrossTrackPosition q2{-10.0, 30.0};
    for (auto _ : state) benchmark::DoNotOptimize(violation_penalties(q2, ctx));
}
BENCHMARK(BM_PenaltyEvaluation);

void BM_ConstraintReport(benchmark::State& state) {
    const ScenarioConfig& cfg = config();
    DecisionState s;
    s.formation = {{-18.0, 38.0}, {-10.0, 30.0}, {}};
    s.resources.v_y.assign(cfg.n_slots, 2.0);
    s.resources.p_com_1.assign(cfg.n_slots, 6.0);
    s.resources.p_com_2.assign(cfg.n_slots, 6.0);
    for (auto _ : state) benchmark::DoNotOptimize(evaluate_constraints(s, cfg, derived()));
}
BENCHMARK(BM_ConstraintReport);

} // namespace
