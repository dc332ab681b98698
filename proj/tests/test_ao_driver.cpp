#include <doctest.h>

#include "uavinsar/ao_driver.hpp"

#include <cmath>

using namespace uavinsar;

namespace {

AoOptions desk_options(const ScenarioConfig& cfg) {
    AoOptions opts = AoOptions::from_config(cfg);
    opts.pso.population = 150;
    opts.pso.max_iterations = 40;
    opts.psi = 0.4;
    return opts;
}

} // namespace

TEST_CASE("initial states carry the published values") {
    const ScenarioConfig cfg;
    const DecisionState f1 = initial_state_f1(cfg);
    CHECK(f1.formation.master.x == -40.0);
    CHECK(f1.formation.master.z == 60.0);
    CHECK(f1.formation.slave.x == -45.0);
    CHECK(f1.formation.slave.z == 50.0);
    CHECK(f1.resources.v_y[0] == 4.0);
    CHECK(f1.resources.p_com_1[0] == doctest::Approx(std::pow(10.0, 0.778)).epsilon(1e-12));
    const DecisionState f2 = initial_state_f2(cfg);
    CHECK(f2.formation.master.x == -20.0);
    CHECK(f2.formation.slave.z == 40.0);
}

TEST_CASE("repair produces a fully feasible state") {
    const ScenarioConfig cfg;
    const DerivedConstants dc = derive_constants(cfg);
    const AoOptions opts = desk_options(cfg);
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
        const DecisionState s = repair_initial_state(cfg, dc, initial_state_f1(cfg), opts, seed);
        CHECK(evaluate_constraints(s, cfg, dc).all_satisfied());
    }
}

TEST_CASE("equal seeds reproduce the identical run") {
    const ScenarioConfig cfg;
    const DerivedConstants dc = derive_constants(cfg);
    const AoOptions opts = desk_options(cfg);
    const Solution a = run_ao(cfg, dc, opts, initial_state_f1(cfg), 31337);
    const Solution b = run_ao(cfg, dc, opts, initial_state_f1(cfg), 31337);
    CHECK(a.coverage == b.coverage);
    CHECK(a.state.formation.master.z == b.state.formation.master.z);
    CHECK(a.state.formation.slave.x == b.state.formation.slave.x);
    REQUIRE(a.coverage_history.size() == b.coverage_history.size());
    for (std::size_t i = 0; i < a.coverage_history.size(); ++i)
        CHECK(a.coverage_history[i] == b.coverage_history[i]);
}

TEST_CASE("AO run: monotone history, feasible result, audited metrics") {
    const ScenarioConfig cfg;
    const DerivedConstants dc = derive_constants(cfg);
    const AoOptions opts = desk_options(cfg);
    const Solution sol = run_ao(cfg, dc, opts, initial_state_f1(cfg), 97);

    CHECK(sol.report.all_satisfied());
    CHECK(sol.report.min_margin() >= -1e-6);
    CHECK(sol.converged);
    CHECK(sol.iterations <= opts.max_outer);
    for (std::size_t m = 1; m < sol.coverage_history.size(); ++m)
        CHECK(sol.coverage_history[m] >= sol.coverage_history[m - 1] - 1e-9);
    CHECK(sol.coverage <= coverage_upper_bound(cfg));

    // audit agrees with a direct recomputation
    const auto base = baseline_components(sol.state.formation, cfg.master_look_angle);
    CHECK(sol.audit.baseline == doctest::Approx(base.b));
    CHECK(sol.audit.perp_baseline == doctest::Approx(base.b_perp));
    CHECK(sol.audit.swath ==
          doctest::Approx(usable_swath(sol.state.formation, cfg.target_x, cfg.master_look_angle,
                                       cfg.beamwidth_3db)));
    double vsum = 0.0;
    for (int n = 0; n + 1 < cfg.n_slots; ++n) vsum += sol.state.resources.v_y[n];
    CHECK(sol.audit.mean_velocity == doctest::Approx(vsum / (cfg.n_slots - 1)));
}

TEST_CASE("psi = 1 and the classical benchmark coincide") {
    const ScenarioConfig cfg;
    const DerivedConstants dc = derive_constants(cfg);
    AoOptions opts = desk_options(cfg);
    opts.psi = 1.0;
    const Solution direct = run_ao(cfg, dc, opts, initial_state_f1(cfg), 555);
    const Solution bench =
        run_benchmark(BenchmarkScheme::classical_ao, cfg, dc, desk_options(cfg),
                      initial_state_f1(cfg), 555);
    CHECK(direct.coverage == doctest::Approx(bench.coverage));
    CHECK(direct.state.formation.master.z == doctest::Approx(bench.state.formation.master.z));
}

TEST_CASE("benchmark scheme 2 freezes the velocity at 4 m/s exactly") {
    const ScenarioConfig cfg;
    const DerivedConstants dc = derive_constants(cfg);
    const Solution sol = run_benchmark(BenchmarkScheme::fixed_steady_speed, cfg, dc,
                                       desk_options(cfg), initial_state_f1(cfg), 777);
    CHECK(sol.report.all_satisfied());
    for (double v : sol.state.resources.v_y) CHECK(v == 4.0);
    CHECK(sol.audit.mean_velocity == doctest::Approx(4.0));
}

TEST_CASE("benchmark scheme 3 pins the slave look angle to 45 degrees") {
    const ScenarioConfig cfg;
    const DerivedConstants dc = derive_constants(cfg);
    const Solution sol = run_benchmark(BenchmarkScheme::fixed_slave_look_angle, cfg, dc,
                                       desk_options(cfg), initial_state_f1(cfg), 888);
    CHECK(sol.report.all_satisfied());
    REQUIRE(sol.state.formation.slave_look_pin.has_value());
    CHECK(sol.audit.slave_look_angle == doctest::Approx(M_PI / 4).epsilon(1e-9));
}

TEST_CASE("psi search: grid size, argmax dominance, tie to the smaller step") {
    const ScenarioConfig cfg;
    const DerivedConstants dc = derive_constants(cfg);
    AoOptions opts = desk_options(cfg);
    opts.pso.population = 60;
    opts.pso.max_iterations = 20;
    opts.max_outer = 6;
    const std::uint64_t seeds[] = {5};
    const PsiSearchResult res =
        search_psi(cfg, dc, opts, initial_state_f1(cfg), 0.25, seeds);
    REQUIRE(res.grid.size() == 5); // 0, .25, .5, .75, 1
    CHECK(res.grid.front().first == 0.0);
    CHECK(res.grid.back().first == 1.0);
    for (const auto& [psi, mean] : res.grid) CHECK(res.mean_coverage >= mean);
    // ties resolve to the smallest psi attaining the max
    for (const auto& [psi, mean] : res.grid) {
        if (mean == res.mean_coverage) {
            CHECK(res.psi == psi);
            break;
        }
    }
    // the documented 1e-2 tolerance gives 101 grid points
    const int steps = static_cast<int>(std::floor(1.0 / cfg.eps_psi + 1e-9)) + 1;
    CHECK(steps == 101);
}

TEST_CASE("coverage upper bound uses the ceiling formation") {
    const ScenarioConfig cfg;
    const double swath_top =
        cfg.altitude_max * (std::tan(cfg.master_look_angle + cfg.beamwidth_3db / 2) -
                            std::tan(cfg.master_look_angle - cfg.beamwidth_3db / 2));
    CHECK(coverage_upper_bound(cfg) ==
          doctest::Approx(swath_top * (cfg.n_slots - 1) * cfg.velocity_max * cfg.slot_duration));
}
