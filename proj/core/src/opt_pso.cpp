#include "uavinsar/opt_pso.hpp"

#include <algorithm>
#include <cmath>

namespace uavinsar {

namespace {

// Penalty fitness under a common offset: feasible candidates score their
// coverage, penalized ones sit below the worst coverage seen so far. Scoring
// every comparison with the same (monotone) offset keeps the ranking
// consistent: any feasible candidate outranks every penalized one.
double score(double cov, double gsum, double offset) {
    return gsum == 0.0 ? cov : offset - gsum;
}

struct Evaluation {
    double cov = 0.0;
    double gsum = 0.0;
};

Evaluation evaluate(const AcrossTrackPosition& q2, SlaveContext& ctx) {
    Evaluation e;
    e.cov = context_coverage(q2, ctx);
    ctx.min_coverage_seen = std::min(ctx.min_coverage_seen, e.cov);
    e.gsum = violation_penalties(q2, ctx).sum();
    return e;
}

void refresh_bests(SwarmState& swarm, const std::vector<Evaluation>& evals, double offset) {
    for (std::size_t d = 0; d < swarm.particles.size(); ++d) {
        Particle& p = swarm.particles[d];
        if (score(evals[d].cov, evals[d].gsum, offset) >
            score(p.best_cov, p.best_gsum, offset)) {
            p.best_x = p.x;
            p.best_z = p.z;
            p.best_cov = evals[d].cov;
            p.best_gsum = evals[d].gsum;
        }
        p.best_fitness = score(p.best_cov, p.best_gsum, offset);
        if (p.best_fitness > swarm.gbest_fitness ||
            (p.best_fitness == swarm.gbest_fitness && swarm.gbest_gsum > 0.0 &&
             p.best_gsum == 0.0)) {
            swarm.gbest_fitness = p.best_fitness;
            swarm.gbest_x = p.best_x;
            swarm.gbest_z = p.best_z;
            swarm.gbest_cov = p.best_cov;
            swarm.gbest_gsum = p.best_gsum;
        }
    }
}

} // namespace

SwarmState init_swarm(SlaveContext& ctx, const PsoOptions& opts, std::uint64_t seed,
                      std::optional<AcrossTrackPosition> warm_start) {
    const ScenarioConfig& cfg = *ctx.cfg;
    SwarmState swarm;
    const int total = opts.population + (warm_start ? 1 : 0);
    swarm.particles.resize(total);

    SplitMix64 init_rng(derive_seed(seed, 0));
    const double x_lo = cfg.target_x - opts.search_offset;
    for (int d = 0; d < total; ++d) {
        Particle& p = swarm.particles[d];
        p.rng = SplitMix64(derive_seed(seed, 1 + d));
        if (warm_start && d == opts.population) {
            p.x = warm_start->x;
            p.z = warm_start->z;
        } else {
            p.x = init_rng.uniform(x_lo, cfg.target_x);
            p.z = init_rng.uniform(cfg.altitude_min, cfg.altitude_max);
        }
        p.vx = init_rng.uniform(0.0, opts.velocity_max);
        p.vz = init_rng.uniform(0.0, opts.velocity_max);
    }

    // evaluate the whole population, then rank under the settled offset
    std::vector<Evaluation> evals(total);
    for (int d = 0; d < total; ++d) evals[d] = evaluate({swarm.particles[d].x, swarm.particles[d].z}, ctx);
    for (int d = 0; d < total; ++d) {
        Particle& p = swarm.particles[d];
        p.best_x = p.x;
        p.best_z = p.z;
        p.best_cov = evals[d].cov;
        p.best_gsum = evals[d].gsum;
    }
    swarm.gbest_fitness = -std::numeric_limits<double>::infinity();
    refresh_bests(swarm, evals, ctx.min_coverage_seen);
    swarm.inertia = 1.0; // w(1)
    swarm.iteration = 1;
    return swarm;
}

void step_swarm(SwarmState& swarm, SlaveContext& ctx, const PsoOptions& opts) {
    const ScenarioConfig& cfg = *ctx.cfg;

    for (Particle& p : swarm.particles) {
        // reflecting wall, tested against the position the particle is about
        // to occupy (C4 above in x, C1 box in z)
        if (p.x + p.vx > cfg.target_x) p.vx = -p.vx;
        if (p.z + p.vz > cfg.altitude_max || p.z + p.vz < cfg.altitude_min) p.vz = -p.vz;

        const double old_x = p.x;
        const double old_z = p.z;
        p.x += p.vx;
        p.z += p.vz;
        // hard clamp as a failsafe when one step exceeds the box width
        p.x = std::min(p.x, cfg.target_x);
        p.z = std::clamp(p.z, cfg.altitude_min, cfg.altitude_max);

        // velocity update from the pre-move position and pre-move bests;
        // R1, R2 are fresh per particle per iteration
        const double r1 = p.rng.uniform01();
        const double r2 = p.rng.uniform01();
        p.vx = swarm.inertia * p.vx + opts.cognitive * r1 * (p.best_x - old_x) +
               opts.social * r2 * (swarm.gbest_x - old_x);
        p.vz = swarm.inertia * p.vz + opts.cognitive * r1 * (p.best_z - old_z) +
               opts.social * r2 * (swarm.gbest_z - old_z);
    }

    swarm.inertia = std::max(0.0, 1.0 - static_cast<double>(swarm.iteration) / opts.max_iterations);

    std::vector<Evaluation> evals(swarm.particles.size());
    for (std::size_t d = 0; d < swarm.particles.size(); ++d)
        evals[d] = evaluate({swarm.particles[d].x, swarm.particles[d].z}, ctx);
    // the offset merge happens once per generation; scores inside one
    // generation are all relative to the same accumulator value
    const double offset = ctx.min_coverage_seen;
    swarm.gbest_fitness = score(swarm.gbest_cov, swarm.gbest_gsum, offset);
    refresh_bests(swarm, evals, offset);
    ++swarm.iteration;
}

PsoResult run_pso(SlaveContext& ctx, const PsoOptions& opts, std::uint64_t seed,
                  std::optional<AcrossTrackPosition> warm_start) {
    SwarmState swarm = init_swarm(ctx, opts, seed, warm_start);
    int stale = 0;
    while (swarm.iteration < opts.max_iterations && stale < opts.patience) {
        const double before = swarm.gbest_fitness;
        step_swarm(swarm, ctx, opts);
        stale = (swarm.gbest_fitness - before < opts.eps) ? stale + 1 : 0;
    }
    PsoResult res;
    res.q2 = {swarm.gbest_x, swarm.gbest_z};
    res.fitness = swarm.gbest_fitness;
    res.feasible = swarm.gbest_gsum == 0.0;
    res.iterations = swarm.iteration;
    return res;
}

} // namespace uavinsar
