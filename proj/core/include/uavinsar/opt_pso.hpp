#pragma once

#include "uavinsar/constraints.hpp"
#include "uavinsar/rng.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

namespace uavinsar {

struct Particle {
    double x = 0.0, z = 0.0;   // position (x2, z2)
    double vx = 0.0, vz = 0.0; // particle velocity
    double best_x = 0.0, best_z = 0.0;
    // best candidate stored as (coverage, penalty sum) so scores can always
    // be compared under the swarm's current penalty offset
    double best_cov = 0.0;
    double best_gsum = std::numeric_limits<double>::infinity();
    double best_fitness = 0.0; // score of the best under the latest offset
    SplitMix64 rng{0};
};

struct PsoOptions {
    int population = 2000;      // D
    int max_iterations = 200;   // M_1
    double cognitive = 0.1;     // c_1
    double social = 0.2;        // c_2
    double velocity_max = 20.0; // v_PSO^max
    double search_offset = 500.0; // O
    double eps = 1e-4;          // minimum gbest improvement
    int patience = 20;          // consecutive stale iterations before stop

    static PsoOptions from_config(const ScenarioConfig& cfg) {
        PsoOptions o;
        o.population = cfg.pso_population;
        o.max_iterations = cfg.pso_max_iterations;
        o.cognitive = cfg.pso_cognitive;
        o.social = cfg.pso_social;
        o.velocity_max = cfg.pso_velocity_max;
        o.search_offset = cfg.search_offset;
        o.eps = cfg.eps_coverage;
        return o;
    }
};

struct SwarmState {
    std::vector<Particle> particles;
    double gbest_x = 0.0, gbest_z = 0.0;
    double gbest_cov = 0.0;
    double gbest_gsum = std::numeric_limits<double>::infinity();
    double gbest_fitness = 0.0; // non-decreasing once any feasible candidate exists
    double inertia = 1.0;       // w(k), linearly decaying
    int iteration = 1;          // k
};

// Uniform population over [x_t - O, x_t] x [z_min, z_max], velocities uniform
// in [0, v_max]^2, optional extra warm-start particle appended (population
// becomes D + 1). The initial population is evaluated here.
SwarmState init_swarm(SlaveContext& ctx, const PsoOptions& opts, std::uint64_t seed,
                      std::optional<AcrossTrackPosition> warm_start = std::nullopt);

// One iteration: reflect velocities at the C1/C4 walls (testing the next
// position), advance, update velocities from the pre-move bests, decay the
// inertia, evaluate, refresh bests.
void step_swarm(SwarmState& swarm, SlaveContext& ctx, const PsoOptions& opts);

struct PsoResult {
    AcrossTrackPosition q2;
    double fitness = 0.0;
    bool feasible = false; // best particle satisfied every penalty constraint
    int iterations = 0;
};

PsoResult run_pso(SlaveContext& ctx, const PsoOptions& opts, std::uint64_t seed,
                  std::optional<AcrossTrackPosition> warm_start = std::nullopt);

} // namespace uavinsar
