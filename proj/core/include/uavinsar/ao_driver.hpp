#pragma once

#include "uavinsar/constraints.hpp"
#include "uavinsar/opt_monotonic.hpp"
#include "uavinsar/opt_pso.hpp"
#include "uavinsar/opt_sca.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace uavinsar {

struct MetricAudit {
    double baseline = 0.0;
    double perp_baseline = 0.0;
    double hoa = 0.0;               // +inf when b_perp = 0
    double height_error_worst = 0.0;
    double gamma_rg = 0.0;
    double gamma_snr_min_slot = 0.0; // worst slot SNR decorrelation
    double swath = 0.0;
    double mean_velocity = 0.0;      // over the N-1 coverage slots
    double slave_look_angle = 0.0;
    std::array<double, 2> slant_range = {0.0, 0.0};
    std::array<double, 2> data_rate_min = {0.0, 0.0};
    std::array<double, 2> energy = {0.0, 0.0};
};

struct Solution {
    DecisionState state;
    double coverage = 0.0;
    ConstraintReport report;
    MetricAudit audit;
    std::vector<double> coverage_history; // entry m = coverage after AO iteration m (0 = init)
    std::vector<DecisionState> state_history; // matching states, for experiment records
    int iterations = 0;
    bool converged = false;
    std::uint64_t seed = 0;
    std::string status;
};

enum class BenchmarkScheme {
    proposed,               // psi-step AO with tuned psi
    classical_ao,           // psi = 1
    fixed_steady_speed,     // v frozen at 4 m/s, powers and formation optimized
    fixed_slave_look_angle, // theta_2 pinned to pi/4
};

struct AoOptions {
    double psi = 1.0;
    int max_outer = 50;
    PsoOptions pso;
    bool freeze_velocity = false;
    std::optional<double> pinned_look_angle;
    bool repair_init = true;

    static AoOptions from_config(const ScenarioConfig& cfg) {
        AoOptions o;
        o.pso = PsoOptions::from_config(cfg);
        return o;
    }
};

// Reference initializations from the experiment design (formation, equal
// per-slot powers of 7.78 dB, steady 4 m/s).
DecisionState initial_state_f1(const ScenarioConfig& cfg);
DecisionState initial_state_f2(const ScenarioConfig& cfg);

// Feasibility repair of an initial point: velocity clamped under the C6 cap
// (unless frozen), link powers raised to the C11 minimum, then if the
// formation itself is infeasible, slave and master placement rounds are run
// until the full report passes. Throws AoError when the scenario admits no
// feasible point this way.
class AoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

DecisionState repair_initial_state(const ScenarioConfig& cfg, const DerivedConstants& dc,
                                   DecisionState state, const AoOptions& opts, std::uint64_t seed);

// psi-step alternating optimization: PSO on the slave, polyblock on the
// master, SCA on the resources, velocity update damped by psi when the
// blended profile stays feasible.
Solution run_ao(const ScenarioConfig& cfg, const DerivedConstants& dc, const AoOptions& opts,
                const DecisionState& init, std::uint64_t seed);

struct PsiSearchResult {
    double psi = 0.0;
    double mean_coverage = 0.0;
    std::vector<std::pair<double, double>> grid; // (psi, mean coverage)
};

// Exhaustive search over {0, eps5, ..., 1}; ties resolved toward smaller psi.
PsiSearchResult search_psi(const ScenarioConfig& cfg, const DerivedConstants& dc,
                           const AoOptions& opts, const DecisionState& init, double eps5,
                           std::span<const std::uint64_t> seeds);

Solution run_benchmark(BenchmarkScheme scheme, const ScenarioConfig& cfg,
                       const DerivedConstants& dc, const AoOptions& opts,
                       const DecisionState& init, std::uint64_t seed);

// Coverage bound of Section IV: widest master swath at z_max times the
// longest admissible track.
double coverage_upper_bound(const ScenarioConfig& cfg);

MetricAudit audit_solution(const DecisionState& s, const ScenarioConfig& cfg,
                           const DerivedConstants& dc);

} // namespace uavinsar
