#pragma once

#include "uavinsar/constraints.hpp"

#include <optional>
#include <vector>

namespace uavinsar {

// Context of the master-altitude subproblem (P.1.b): slave position and
// resources are frozen.
struct MasterContext {
    const ScenarioConfig* cfg = nullptr;
    const DerivedConstants* dc = nullptr;
    AcrossTrackPosition q2;
    std::optional<double> slave_pin;
    std::vector<double> v_y;
    std::vector<double> p_com_1;

    // precomputed
    double r2 = 0.0;
    double theta_2 = 0.0;
    double b_perp = 0.0;        // depends on q2 only (C2 pins the master LOS)
    double v_peak = 0.0;        // max_n v_y[n], the binding slot of C6
    std::vector<double> ygs_sq; // (y[n] - g_y)^2 per slot
    std::vector<double> p1_beta; // P_com,1[n] beta_c1 per slot
    double along_track = 0.0;   // sum_{n<N} v_y[n] delta_t
    double dphi90_worst = 0.0;

    // The incumbent master position only seeds b_perp when the slave look
    // angle is pinned (the q2-only identity assumes target steering).
    static MasterContext make(const ScenarioConfig& cfg, const DerivedConstants& dc,
                              const FormationState& formation, std::vector<double> v_y,
                              std::vector<double> p_com_1);
};

// Monotonic reformulation over the vertex (z1, t). a1/a2 collect the
// increasing/decreasing parts of the master data-rate constraint; the
// auxiliary t decouples them so both sides are monotone. The slot maximum in
// a1 keeps each slot's link power paired with its own distance, so
// a1 <= a2 is exactly the per-slot data-rate constraint.
struct MonotonicProblem {
    const MasterContext* ctx = nullptr;
    double z_lower = 0.0; // Z_min
    double z_upper = 0.0; // Z_max
    double t_max = 0.0;   // a1(z_max) - a1(0)

    double a1(double z1) const;
    double a2(double z1) const;
    bool feasible_interval() const { return z_lower <= z_upper; }

    double coverage_at(double z1) const; // objective of the induced q1
    bool in_normal_set(double z1, double t) const;   // C1a-bar, C6, C11a-bar, C11c-bar
    bool in_conormal_set(double z1, double t) const; // C1b-bar, C11b-bar
};

// Bounds of the master altitude from C1, C3, C5, C8 (lower) and C1, C9, C5
// (upper). The minimum-baseline constraint C5 splits the admissible slant
// range into two branches when b_min > b_perp; `primary` is the far branch
// (larger z1, better coverage), `fallback` the near one.
struct TransformResult {
    MonotonicProblem primary;
    std::optional<MonotonicProblem> fallback;
};

TransformResult transform_p1b(const MasterContext& ctx);

struct Vertex {
    double z1 = 0.0;
    double t = 0.0;
};

// Algorithm 3: bisection along the ray lambda * l for the last scale still in
// the normal set. Uses ceil(log2(1 / eps2)) iterations.
Vertex project_onto_boundary(const Vertex& l, const MonotonicProblem& problem, double eps2,
                             int* iterations = nullptr);

struct PolyblockResult {
    bool feasible = false;
    AcrossTrackPosition q1;
    double coverage = 0.0;
    int iterations = 0;
    double gap = 0.0;                     // |C_N(l*) - CBV| at exit
    std::vector<double> cbv_history;      // current best value per iteration
    bool hit_iteration_cap = false;
};

inline constexpr int kPolyblockMaxIterations = 500; // M_2

// Algorithm 2 on one branch.
PolyblockResult polyblock_solve(const MonotonicProblem& problem, double eps1, double eps2);

// Full (P.1.b) solve: primary branch, then the fallback branch when the
// primary is infeasible.
PolyblockResult optimize_master_altitude(const MasterContext& ctx, double eps1, double eps2);

} // namespace uavinsar
