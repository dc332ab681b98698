#include <doctest.h>

#include "uavinsar/ao_driver.hpp"
#include "uavinsar/opt_pso.hpp"

#include <cmath>

using namespace uavinsar;

namespace {

struct Fixture {
    ScenarioConfig cfg;
    DerivedConstants dc;
    DecisionState state;
    Fixture() {
        dc = derive_constants(cfg);
        AoOptions opts = AoOptions::from_config(cfg);
        opts.pso.population = 150;
        opts.pso.max_iterations = 40;
        state = repair_initial_state(cfg, dc, initial_state_f1(cfg), opts, 1234);
    }
    SlaveContext context() const {
        return SlaveContext::make(cfg, dc, state.formation.master, state.resources.v_y,
                                  state.resources.p_com_2, {});
    }
    PsoOptions options() const {
        PsoOptions o = PsoOptions::from_config(cfg);
        o.population = 120;
        o.max_iterations = 40;
        return o;
    }
};

bool same_swarm(const SwarmState& a, const SwarmState& b) {
    if (a.particles.size() != b.particles.size()) return false;
    for (std::size_t i = 0; i < a.particles.size(); ++i) {
        if (a.particles[i].x != b.particles[i].x || a.particles[i].z != b.particles[i].z ||
            a.particles[i].vx != b.particles[i].vx || a.particles[i].vz != b.particles[i].vz)
            return false;
    }
    return a.gbest_x == b.gbest_x && a.gbest_z == b.gbest_z &&
           a.gbest_fitness == b.gbest_fitness;
}

} // namespace

TEST_CASE("fixed seed replays the identical swarm trajectory") {
    Fixture fx;
    SlaveContext c1 = fx.context(), c2 = fx.context();
    const PsoOptions opts = fx.options();
    SwarmState s1 = init_swarm(c1, opts, 99);
    SwarmState s2 = init_swarm(c2, opts, 99);
    CHECK(same_swarm(s1, s2));
    for (int k = 0; k < 10; ++k) {
        step_swarm(s1, c1, opts);
        step_swarm(s2, c2, opts);
    }
    CHECK(same_swarm(s1, s2));

    SlaveContext c3 = fx.context(), c4 = fx.context();
    const PsoResult r1 = run_pso(c3, opts, 7);
    const PsoResult r2 = run_pso(c4, opts, 7);
    CHECK(r1.q2.x == r2.q2.x);
    CHECK(r1.q2.z == r2.q2.z);
    CHECK(r1.fitness == r2.fitness);
}

TEST_CASE("initial population fills the search box") {
    Fixture fx;
    SlaveContext ctx = fx.context();
    PsoOptions opts = fx.options();
    opts.population = 500;
    const SwarmState swarm = init_swarm(ctx, opts, 3);
    const double x_lo = fx.cfg.target_x - opts.search_offset; // O = 500
    for (const Particle& p : swarm.particles) {
        CHECK(p.x >= x_lo);
        CHECK(p.x <= fx.cfg.target_x);
        CHECK(p.z >= fx.cfg.altitude_min);
        CHECK(p.z <= fx.cfg.altitude_max);
        CHECK(p.vx >= 0.0);
        CHECK(p.vx <= opts.velocity_max);
        CHECK(p.vz >= 0.0);
        CHECK(p.vz <= opts.velocity_max);
    }
    // uniform-ish spread: both halves of the x range are populated
    int left = 0;
    for (const Particle& p : swarm.particles) left += p.x < x_lo / 2;
    CHECK(left > 100);
    CHECK(left < 400);
}

TEST_CASE("warm start joins the population verbatim and dominates the result") {
    Fixture fx;
    SlaveContext ctx = fx.context();
    const PsoOptions opts = fx.options();
    const AcrossTrackPosition warm = fx.state.formation.slave;
    const SwarmState swarm = init_swarm(ctx, opts, 5, warm);
    CHECK(swarm.particles.size() == static_cast<std::size_t>(opts.population) + 1);
    CHECK(swarm.particles.back().x == warm.x);
    CHECK(swarm.particles.back().z == warm.z);

    // the warm start is feasible here, so the result must score at least as well
    SlaveContext ctx2 = fx.context();
    const double warm_cov = context_coverage(warm, ctx2);
    SlaveContext ctx3 = fx.context();
    const PsoResult res = run_pso(ctx3, opts, 5, warm);
    CHECK(res.fitness >= warm_cov - 1e-9);
    CHECK(res.feasible);
}

TEST_CASE("ballistic degenerate coefficients keep particles inside the walls") {
    Fixture fx;
    SlaveContext ctx = fx.context();
    PsoOptions opts = fx.options();
    opts.cognitive = 0.0;
    opts.social = 0.0;
    opts.max_iterations = 60;
    SwarmState swarm = init_swarm(ctx, opts, 17);
    for (int k = 0; k < 50; ++k) {
        step_swarm(swarm, ctx, opts);
        for (const Particle& p : swarm.particles) {
            CHECK(p.x <= fx.cfg.target_x + 1e-9);
            CHECK(p.z >= fx.cfg.altitude_min - 1e-9);
            CHECK(p.z <= fx.cfg.altitude_max + 1e-9);
        }
    }
}

TEST_CASE("a converged swarm at the global best is a fixed point") {
    Fixture fx;
    SlaveContext ctx = fx.context();
    PsoOptions opts = fx.options();
    opts.population = 8;
    SwarmState swarm = init_swarm(ctx, opts, 13);
    // collapse everything onto the current global best with zero velocity
    for (Particle& p : swarm.particles) {
        p.x = p.best_x = swarm.gbest_x;
        p.z = p.best_z = swarm.gbest_z;
        p.vx = p.vz = 0.0;
        p.best_fitness = swarm.gbest_fitness;
    }
    const double bx = swarm.gbest_x, bz = swarm.gbest_z;
    for (int k = 0; k < 5; ++k) {
        step_swarm(swarm, ctx, opts);
        for (const Particle& p : swarm.particles) {
            CHECK(p.x == doctest::Approx(bx).epsilon(1e-12));
            CHECK(p.z == doctest::Approx(bz).epsilon(1e-12));
        }
    }
}

TEST_CASE("global best fitness is monotone across many random steps") {
    Fixture fx;
    SlaveContext ctx = fx.context();
    PsoOptions opts = fx.options();
    opts.population = 60;
    opts.max_iterations = 1200;
    // warm-started with the feasible incumbent: the global best is feasible
    // from the start, so its score does not depend on the penalty offset
    SwarmState swarm = init_swarm(ctx, opts, 23, fx.state.formation.slave);
    double best = swarm.gbest_fitness;
    for (int k = 0; k < 1000; ++k) {
        step_swarm(swarm, ctx, opts);
        CHECK(swarm.gbest_fitness >= best);
        best = swarm.gbest_fitness;
    }
}

TEST_CASE("run_pso approaches the exhaustive grid optimum") {
    Fixture fx;
    // coarse benchmark context
    PsoOptions opts = fx.options();
    opts.population = 250;
    opts.max_iterations = 80;
    SlaveContext grid_ctx = fx.context();
    double best_grid = -1.0;
    for (double x = fx.cfg.target_x - 120.0; x <= fx.cfg.target_x; x += 1.0)
        for (double z = fx.cfg.altitude_min; z <= fx.cfg.altitude_max; z += 1.0) {
            const AcrossTrackPosition q2{x, z};
            if (!violation_penalties(q2, grid_ctx).feasible()) continue;
            best_grid = std::max(best_grid, context_coverage(q2, grid_ctx));
        }
    REQUIRE(best_grid > 0.0);
    SlaveContext run_ctx = fx.context();
    const PsoResult res = run_pso(run_ctx, opts, 31);
    CHECK(res.feasible);
    CHECK(res.fitness >= 0.99 * best_grid);
}

TEST_CASE("returned coverage respects the master-swath bound") {
    Fixture fx;
    SlaveContext ctx = fx.context();
    const PsoResult res = run_pso(ctx, fx.options(), 41);
    const auto bounds = footprint_bounds(fx.state.formation.master, fx.cfg.master_look_angle,
                                         fx.cfg.beamwidth_3db);
    double along = 0.0;
    for (std::size_t n = 0; n + 1 < fx.state.resources.v_y.size(); ++n)
        along += fx.state.resources.v_y[n];
    CHECK(res.fitness <= (bounds.far - bounds.near) * along * fx.cfg.slot_duration + 1e-9);
}

TEST_CASE("reference optimizer parameters flow from the scenario") {
    const ScenarioConfig cfg;
    const PsoOptions opts = PsoOptions::from_config(cfg);
    CHECK(opts.population == 2000);
    CHECK(opts.max_iterations == 200);
    CHECK(opts.cognitive == doctest::Approx(0.1));
    CHECK(opts.social == doctest::Approx(0.2));
    CHECK(opts.velocity_max == doctest::Approx(20.0));
    CHECK(opts.search_offset == doctest::Approx(500.0));
}
