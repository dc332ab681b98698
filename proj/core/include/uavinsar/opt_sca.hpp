#pragma once

#include "uavinsar/constraints.hpp"

#include <optional>
#include <vector>

namespace uavinsar {

// Context of the resource subproblem (P.1.c): the formation is frozen.
struct ScaContext {
    const ScenarioConfig* cfg = nullptr;
    const DerivedConstants* dc = nullptr;
    FormationState formation;

    // precomputed
    double swath = 0.0;
    double v_cap = 0.0;                    // min(v_max, C6 closed-form cap)
    bool c6_feasible = false;              // v_cap >= v_min
    std::array<double, 2> kappa = {0, 0};  // 2^(R_min,i / B_c,i) - 1
    std::array<double, 2> c0 = {0, 0};     // (x_i-g_x)^2 + (z_i-g_z)^2
    std::array<double, 2> r_min = {0, 0};  // sensing data rates [bit/s]

    static std::optional<ScaContext> make(const ScenarioConfig& cfg, const DerivedConstants& dc,
                                          const FormationState& f);
};

// Unique v > 0 with gamma_SNR(v) = gamma_snr_min for the given formation
// (closed-form root of the product SNR constraint). Returns min(root, v_max);
// an empty optional means even v_min violates C6.
std::optional<double> c6_velocity_cap(const FormationState& f, const ScenarioConfig& cfg,
                                      const DerivedConstants& dc);

// Tangent data of f(v, u) = (u^2/P_I^2 + v^2/(2 v_0^2))^2 at one slot.
struct C12aLinearization {
    double v0 = 0.0, u0 = 0.0; // expansion point
    double f0 = 0.0;           // f at the point
    double gv = 0.0, gu = 0.0; // partial derivatives at the point
    double value(double v, double u) const { return f0 + gv * (v - v0) + gu * (u - u0); }
};

C12aLinearization linearize_c12a(double v, double u, const DerivedConstants& dc);
std::vector<C12aLinearization> linearize_c12a(std::span<const double> v, std::span<const double> u,
                                              const DerivedConstants& dc);

struct ScaIterate {
    std::vector<double> v_y;
    std::vector<double> u;
    std::vector<double> p_com_1;
    std::vector<double> p_com_2;
    double objective = 0.0; // coverage [m^2]
};

// One convexified subproblem (P.1.c-tilde) around a linearization point.
struct ConvexSubproblem {
    const ScaContext* ctx = nullptr;
    std::vector<C12aLinearization> c12a;
    std::vector<double> objective_weight; // S * delta_t per slot (last slot: tie-break)
};

ConvexSubproblem build_subproblem(const ScaContext& ctx, std::span<const double> v,
                                  std::span<const double> u);

struct SolveStatus {
    bool feasible = false;
    ScaIterate point;
    double kkt_residual = 0.0; // stationarity residual of the barrier optimum
    std::string message;
};

// Interior-point (log-barrier Newton) solve of the subproblem. The
// communication powers are recovered as the C11-minimal powers, which is the
// KKT-complementary choice since they only consume energy otherwise.
SolveStatus solve_convex(const ConvexSubproblem& sub,
                         std::optional<ScaIterate> warm_start = std::nullopt);

struct ScaResult {
    bool feasible = false;
    ScaIterate final;
    int iterations = 0;
    std::vector<double> objective_history;
    std::string message;
};

inline constexpr int kScaMaxIterations = 100; // M_3

// Algorithm: iterate linearize -> solve until the relative objective change
// drops below eps3. The final point satisfies the original energy constraint
// (exact propulsion model), not just the slack surrogate.
ScaResult run_sca(const ScaContext& ctx, std::span<const double> v_init,
                  std::span<const double> u_init, double eps3);

// Canonical slack initialization: u = exact induced power at v.
std::vector<double> induced_power_slack(std::span<const double> v, const DerivedConstants& dc);

} // namespace uavinsar
