#include "uavinsar/opt_monotonic.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace uavinsar {

namespace {
constexpr double kTiny = 1e-12;
}

MasterContext MasterContext::make(const ScenarioConfig& cfg, const DerivedConstants& dc,
                                  const FormationState& formation, std::vector<double> v_y,
                                  std::vector<double> p_com_1) {
    MasterContext ctx;
    ctx.cfg = &cfg;
    ctx.dc = &dc;
    ctx.q2 = formation.slave;
    ctx.slave_pin = formation.slave_look_pin;
    ctx.v_y = std::move(v_y);
    ctx.p_com_1 = std::move(p_com_1);

    ctx.r2 = slant_range(ctx.q2, cfg.target_x);
    ctx.theta_2 = effective_slave_look_angle(formation, cfg.target_x);
    if (!ctx.slave_pin) {
        // under C2 and target steering the perpendicular baseline depends on
        // the slave only
        ctx.b_perp = ctx.r2 * std::abs(std::sin(cfg.master_look_angle - ctx.theta_2));
    } else {
        // pinned beam: fall back to the incumbent-master decomposition
        ctx.b_perp = baseline_components(formation, cfg.master_look_angle).b_perp;
    }

    ctx.v_peak = *std::max_element(ctx.v_y.begin(), ctx.v_y.end());
    const auto y = along_track_positions(ctx.v_y, cfg.slot_duration);
    ctx.ygs_sq.reserve(y.size());
    for (double yn : y) {
        const double e = yn - cfg.gs_position.y;
        ctx.ygs_sq.push_back(e * e);
    }
    ctx.p1_beta.reserve(ctx.p_com_1.size());
    for (double p : ctx.p_com_1) ctx.p1_beta.push_back(p * cfg.comm_ref_gain[0]);
    for (std::size_t n = 0; n + 1 < ctx.v_y.size(); ++n) ctx.along_track += ctx.v_y[n];
    ctx.along_track *= cfg.slot_duration;
    ctx.dphi90_worst = delta_phi_90_cached(worst_case_coherence(cfg), cfg.n_looks);
    return ctx;
}

double MonotonicProblem::a1(double z1) const {
    const ScenarioConfig& cfg = *ctx->cfg;
    const DerivedConstants& dc = *ctx->dc;
    const double tan1 = std::tan(cfg.master_look_angle);
    const double gx_off = cfg.gs_position.x - cfg.target_x;
    const double expo = std::exp2(dc.a1_slope * z1 + dc.a1_offset) - 1.0;
    const double bracket = z1 * z1 * (tan1 * tan1 + 1.0) + gx_off * gx_off +
                           cfg.gs_position.z * cfg.gs_position.z +
                           2.0 * z1 * tan1 * std::max(gx_off, 0.0);
    double worst_slot = -std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < ctx->ygs_sq.size(); ++n)
        worst_slot = std::max(worst_slot, expo * ctx->ygs_sq[n] - ctx->p1_beta[n]);
    return expo * bracket + worst_slot;
}

double MonotonicProblem::a2(double z1) const {
    const ScenarioConfig& cfg = *ctx->cfg;
    const DerivedConstants& dc = *ctx->dc;
    const double tan1 = std::tan(cfg.master_look_angle);
    const double expo = std::exp2(dc.a1_slope * z1 + dc.a1_offset) - 1.0;
    return expo * (2.0 * z1 * cfg.gs_position.z +
                   2.0 * z1 * tan1 * std::max(cfg.target_x - cfg.gs_position.x, 0.0));
}

double MonotonicProblem::coverage_at(double z1) const {
    const ScenarioConfig& cfg = *ctx->cfg;
    const AcrossTrackPosition q1{master_x_from_altitude(z1, cfg.target_x, cfg.master_look_angle), z1};
    double swath = 0.0;
    try {
        swath = usable_swath({q1, ctx->q2, ctx->slave_pin}, cfg.target_x, cfg.master_look_angle,
                             cfg.beamwidth_3db);
    } catch (const GeometryError&) {
        swath = 0.0;
    }
    return swath * ctx->along_track;
}

bool MonotonicProblem::in_normal_set(double z1, double t) const {
    const ScenarioConfig& cfg = *ctx->cfg;
    const DerivedConstants& dc = *ctx->dc;
    if (z1 > z_upper + kTiny) return false;                       // C1a-bar
    if (t < -kTiny || t > t_max + kTiny) return false;            // C11c-bar
    if (a1(z1) + t > a1(cfg.altitude_max) + kTiny) return false;  // C11a-bar
    // C6 at the fastest slot (both factors of the product grow with v)
    const double r1 = z1 / std::cos(cfg.master_look_angle);
    const double inv1 = inverse_sar_snr(dc.gamma_r[0], ctx->v_peak, r1, cfg.master_look_angle);
    const double inv2 = inverse_sar_snr(dc.gamma_r[1], ctx->v_peak, ctx->r2, ctx->theta_2);
    return snr_decorrelation(inv1, inv2) >= cfg.gamma_snr_min - kTiny;
}

bool MonotonicProblem::in_conormal_set(double z1, double t) const {
    if (z1 < z_lower - kTiny) return false;                          // C1b-bar
    return a2(z1) + t >= a1(ctx->cfg->altitude_max) - kTiny;         // C11b-bar
}

TransformResult transform_p1b(const MasterContext& ctx) {
    const ScenarioConfig& cfg = *ctx.cfg;
    const double cos1 = std::cos(cfg.master_look_angle);
    const double sin1 = std::sin(cfg.master_look_angle);

    // slant-range bounds common to both C5 branches
    double r_lo = std::max(cfg.altitude_min / cos1, ctx.r2);
    if (ctx.b_perp > 0.0)
        r_lo = std::max(r_lo, ctx.b_perp * cfg.hoa_min / (cfg.wavelength * sin1)); // C8
    double r_hi = cfg.altitude_max / cos1;
    {
        // C9: the worst-case height error grows linearly with r1
        const double c9 = ctx.b_perp > 0.0
                              ? 2.0 * 3.14159265358979323846 * ctx.b_perp * cfg.height_error_max /
                                    (cfg.wavelength * sin1 * ctx.dphi90_worst)
                              : 0.0;
        r_hi = std::min(r_hi, c9);
    }

    TransformResult out;
    out.primary.ctx = &ctx;
    const auto finalize = [&](MonotonicProblem& p, double lo, double hi) {
        p.ctx = &ctx;
        p.z_lower = cos1 * lo;
        p.z_upper = cos1 * hi;
        p.t_max = std::max(p.a1(cfg.altitude_max) - p.a1(0.0), 0.0);
    };

    if (cfg.baseline_min <= ctx.b_perp) {
        finalize(out.primary, r_lo, r_hi);
        return out;
    }
    // C5 splits the admissible slant range; the far branch dominates in
    // coverage whenever it is non-empty.
    const double sep = std::sqrt(std::max(cfg.baseline_min * cfg.baseline_min -
                                              ctx.b_perp * ctx.b_perp,
                                          0.0));
    const double r_center = ctx.r2 * std::cos(cfg.master_look_angle - ctx.theta_2);
    finalize(out.primary, std::max(r_lo, r_center + sep), r_hi);
    out.fallback.emplace();
    finalize(*out.fallback, r_lo, std::min(r_hi, r_center - sep));
    return out;
}

Vertex project_onto_boundary(const Vertex& l, const MonotonicProblem& problem, double eps2,
                             int* iterations) {
    double lo = 0.0;
    double hi = 1.0;
    int count = 0;
    while (hi - lo > eps2) {
        const double mid = (lo + hi) / 2.0;
        if (problem.in_normal_set(mid * l.z1, mid * l.t))
            lo = mid;
        else
            hi = mid;
        ++count;
    }
    if (iterations) *iterations = count;
    return {lo * l.z1, lo * l.t}; // lower end of the bracket stays feasible
}

PolyblockResult polyblock_solve(const MonotonicProblem& problem, double eps1, double eps2) {
    PolyblockResult res;
    const ScenarioConfig& cfg = *problem.ctx->cfg;
    if (!problem.feasible_interval()) return res;
    if (!problem.in_normal_set(0.0, 0.0)) return res; // empty normal set

    std::vector<Vertex> verts{{cfg.altitude_max, problem.t_max}};
    auto prune = [&] {
        std::erase_if(verts, [&](const Vertex& v) {
            return !problem.in_conormal_set(v.z1, v.t);
        });
    };
    prune();

    double cbv = -std::numeric_limits<double>::infinity();
    Vertex best{};
    bool have_best = false;

    int j = 0;
    while (!verts.empty()) {
        if (++j > kPolyblockMaxIterations) {
            res.hit_iteration_cap = true;
            break;
        }
        // best vertex by objective; ties toward larger t, then larger z1
        auto it = std::max_element(verts.begin(), verts.end(), [&](const Vertex& a, const Vertex& b) {
            const double ca = problem.coverage_at(a.z1);
            const double cb = problem.coverage_at(b.z1);
            if (ca != cb) return ca < cb;
            if (a.t != b.t) return a.t < b.t;
            return a.z1 < b.z1;
        });
        const Vertex sel = *it;
        const double upper = problem.coverage_at(sel.z1);
        res.gap = upper - cbv;
        if (res.gap <= eps1) break; // remaining polyblock cannot beat the incumbent

        const Vertex proj = project_onto_boundary(sel, problem, eps2);
        if (problem.in_conormal_set(proj.z1, proj.t)) {
            const double value = problem.coverage_at(proj.z1);
            if (value > cbv) {
                cbv = value;
                best = proj;
                have_best = true;
            }
        }
        verts.erase(it);
        const Vertex child_a{proj.z1, sel.t};
        const Vertex child_b{sel.z1, proj.t};
        // a projection that did not move generates no new information
        if (std::abs(child_a.z1 - sel.z1) > kTiny || std::abs(child_a.t - sel.t) > kTiny)
            verts.push_back(child_a);
        if (std::abs(child_b.t - sel.t) > kTiny || std::abs(child_b.z1 - sel.z1) > kTiny)
            verts.push_back(child_b);
        prune();
        res.cbv_history.push_back(cbv);
    }

    res.iterations = j;
    if (!have_best) return res;
    res.feasible = true;
    res.coverage = cbv;
    res.q1 = {master_x_from_altitude(best.z1, cfg.target_x, cfg.master_look_angle), best.z1};
    return res;
}

PolyblockResult optimize_master_altitude(const MasterContext& ctx, double eps1, double eps2) {
    const TransformResult t = transform_p1b(ctx);
    if (t.primary.feasible_interval()) {
        PolyblockResult r = polyblock_solve(t.primary, eps1, eps2);
        if (r.feasible) return r;
    }
    if (t.fallback && t.fallback->feasible_interval())
        return polyblock_solve(*t.fallback, eps1, eps2);
    PolyblockResult r;
    return r;
}

} // namespace uavinsar
