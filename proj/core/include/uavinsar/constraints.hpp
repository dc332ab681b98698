#pragma once

#include "uavinsar/comms_energy.hpp"
#include "uavinsar/geometry.hpp"
#include "uavinsar/insar_metrics.hpp"
#include "uavinsar/scenario.hpp"

#include <array>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace uavinsar {

// Per-slot resources shared by both platforms plus per-UAV link powers.
struct ResourceState {
    std::vector<double> v_y;     // [m/s], length N
    std::vector<double> p_com_1; // [W], length N
    std::vector<double> p_com_2; // [W], length N
};

struct DecisionState {
    FormationState formation;
    ResourceState resources;
};

struct ConstraintEntry {
    bool satisfied = false;
    double margin = 0.0; // signed, native units; satisfied <=> margin >= -1e-9
};

inline constexpr double kConstraintTol = 1e-9;

struct ConstraintReport {
    std::array<ConstraintEntry, 15> entries{}; // index i holds C(i+1)

    const ConstraintEntry& at(int constraint_id) const { return entries[constraint_id - 1]; }
    bool all_satisfied() const {
        for (const auto& e : entries)
            if (!e.satisfied) return false;
        return true;
    }
    double min_margin() const {
        double m = std::numeric_limits<double>::infinity();
        for (const auto& e : entries) m = std::min(m, e.margin);
        return m;
    }
};

// Evaluates C1..C15 for a full decision state. Geometry that breaks a metric
// precondition (grazing footprints, zero perpendicular baseline) surfaces as
// an explicit infeasible entry rather than an exception.
ConstraintReport evaluate_constraints(const DecisionState& s, const ScenarioConfig& cfg,
                                      const DerivedConstants& dc);

// C6, C10, C11, C12, C13 only: the feasibility test of the resource
// subproblem (P.1.c) used by the psi-step update rule.
bool resources_feasible(const DecisionState& s, const ScenarioConfig& cfg,
                        const DerivedConstants& dc, double tol = kConstraintTol);

// Lifts each communication power halfway from its current level toward the
// cap, as far as the per-UAV energy budget allows. Any level between the
// C11 minimum and the cap is optimal for the resource subproblem when energy
// is slack; carrying headroom keeps the placement subproblems from being
// anchored to the incumbent's tailored power profile.
void relax_link_powers(DecisionState& s, const ScenarioConfig& cfg, const DerivedConstants& dc);

// Context of the slave-placement subproblem (P.1.a): everything except q2 is
// frozen. Precomputes per-slot quantities so one fitness call is O(N).
struct SlaveContext {
    const ScenarioConfig* cfg = nullptr;
    const DerivedConstants* dc = nullptr;
    AcrossTrackPosition q1;
    std::optional<double> slave_pin;
    std::vector<double> v_y;
    std::vector<double> p_com_2;

    // precomputed from the fields above
    double r1 = 0.0;
    double master_inv_snr_unit = 0.0;          // r1^3 sin(theta_1) / gamma_r1
    std::vector<double> y;                     // along-track positions
    std::vector<double> ygs_sq;                // (y[n] - g_y)^2
    double dphi90_worst = 0.0;                 // cached for C9
    SwathBounds master_swath;

    // running minimum of the coverage objective over every particle
    // evaluated so far (the penalty offset of the fitness function)
    double min_coverage_seen = std::numeric_limits<double>::infinity();

    static SlaveContext make(const ScenarioConfig& cfg, const DerivedConstants& dc,
                             const AcrossTrackPosition& q1, std::vector<double> v_y,
                             std::vector<double> p_com_2,
                             std::optional<double> slave_pin = std::nullopt);
};

// Clamped violation magnitudes g_l, l in {3,5,6,7,8,9,11,14}, native units.
struct PenaltySet {
    double g3 = 0.0, g5 = 0.0, g6 = 0.0, g7 = 0.0, g8 = 0.0, g9 = 0.0, g11 = 0.0, g14 = 0.0;
    double sum() const { return g3 + g5 + g6 + g7 + g8 + g9 + g11 + g14; }
    bool feasible() const { return sum() == 0.0; }
};

PenaltySet violation_penalties(const AcrossTrackPosition& q2, const SlaveContext& ctx);

// Penalty fitness: coverage when feasible, (min coverage seen) - sum(g_l)
// otherwise. Updates ctx.min_coverage_seen with the candidate's coverage.
double fitness(const AcrossTrackPosition& q2, SlaveContext& ctx);

// Coverage of a candidate slave position in a context (objective only).
double context_coverage(const AcrossTrackPosition& q2, const SlaveContext& ctx);

const char* constraint_name(int constraint_id); // "C1".."C15"

} // namespace uavinsar
