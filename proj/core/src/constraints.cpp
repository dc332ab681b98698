#include "uavinsar/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uavinsar {

namespace {

constexpr double kHalfPi = 1.57079632679489662;
constexpr double kInf = std::numeric_limits<double>::infinity();

ConstraintEntry entry(double margin, double tol = kConstraintTol) {
    return {margin >= -tol, margin};
}

// Data-rate continuation used while scoring infeasible PSO candidates whose
// footprint would graze the horizon: the look angle is capped just below the
// grazing edge, which keeps the penalty finite and monotone in theta_2.
double capped_min_data_rate(double z, double look_angle, const ScenarioConfig& cfg) {
    const double cap = kHalfPi - cfg.beamwidth_3db / 2.0 - 1e-6;
    return min_data_rate(z, std::min(look_angle, cap), cfg);
}

} // namespace

const char* constraint_name(int constraint_id) {
    static const char* names[] = {"C1", "C2", "C3", "C4", "C5", "C6", "C7", "C8",
                                  "C9", "C10", "C11", "C12", "C13", "C14", "C15"};
    return names[constraint_id - 1];
}

ConstraintReport evaluate_constraints(const DecisionState& s, const ScenarioConfig& cfg,
                                      const DerivedConstants& dc) {
    const std::size_t n_slots = static_cast<std::size_t>(cfg.n_slots);
    if (s.resources.v_y.size() != n_slots || s.resources.p_com_1.size() != n_slots ||
        s.resources.p_com_2.size() != n_slots)
        throw std::invalid_argument("decision state vectors must have length n_slots");

    ConstraintReport rep;
    const auto& q1 = s.formation.master;
    const auto& q2 = s.formation.slave;
    const auto& v = s.resources.v_y;

    auto box = [](double lo, double x, double hi) { return std::min(x - lo, hi - x); };

    rep.entries[0] = entry(std::min(box(cfg.altitude_min, q1.z, cfg.altitude_max),
                                    box(cfg.altitude_min, q2.z, cfg.altitude_max)));
    const double c2_residual = q1.x - master_x_from_altitude(q1.z, cfg.target_x, cfg.master_look_angle);
    rep.entries[1] = {std::abs(c2_residual) <= kConstraintTol, c2_residual};

    const double r1 = slant_range(q1, cfg.target_x);
    const double r2 = slant_range(q2, cfg.target_x);
    rep.entries[2] = entry(r1 - r2);
    rep.entries[3] = entry(cfg.target_x - q2.x);

    const auto base = baseline_components(s.formation, cfg.master_look_angle);
    rep.entries[4] = entry(base.b - cfg.baseline_min);

    if (q1.z <= 0.0 || q2.z <= 0.0) {
        // degenerate geometry: every metric-backed constraint is infeasible
        for (int c : {6, 7, 8, 9, 11, 14}) rep.entries[c - 1] = {false, -kInf};
        rep.entries[14] = {false, -kInf}; // C15: look angle undefined
    } else {
        const double theta_2 = effective_slave_look_angle(s.formation, cfg.target_x);

        double c6 = kInf;
        const double unit1 = r1 * r1 * r1 * std::sin(cfg.master_look_angle) / dc.gamma_r[0];
        const double unit2 = r2 * r2 * r2 * std::sin(theta_2) / dc.gamma_r[1];
        for (double vn : v) {
            const double g = snr_decorrelation(vn * unit1, vn * unit2);
            c6 = std::min(c6, g - cfg.gamma_snr_min);
        }
        rep.entries[5] = entry(c6);

        rep.entries[6] = entry(baseline_decorrelation(theta_2, cfg.master_look_angle,
                                                      dc.fractional_bandwidth) -
                               cfg.gamma_rg_min);

        if (base.b_perp <= 0.0) {
            rep.entries[7] = {true, kInf};   // C8: HoA unbounded
            rep.entries[8] = {false, -kInf}; // C9: no height sensitivity at all
        } else {
            const double h_amb = height_of_ambiguity(cfg.wavelength, r1, cfg.master_look_angle,
                                                     base.b_perp);
            rep.entries[7] = entry(h_amb - cfg.hoa_min);
            const double dphi = delta_phi_90_cached(worst_case_coherence(cfg), cfg.n_looks);
            rep.entries[8] = entry(cfg.height_error_max - relative_height_error(h_amb, dphi));
        }

        double c11 = kInf;
        const auto y = along_track_positions(v, cfg.slot_duration);
        try {
            const double look[2] = {cfg.master_look_angle, theta_2};
            const AcrossTrackPosition* pos[2] = {&q1, &q2};
            const std::vector<double>* p_com[2] = {&s.resources.p_com_1, &s.resources.p_com_2};
            for (int i = 0; i < 2; ++i) {
                const double r_min = min_data_rate(pos[i]->z, look[i], cfg);
                for (std::size_t n = 0; n < n_slots; ++n) {
                    const double d = gs_distance(*pos[i], y[n], cfg.gs_position);
                    const double rate = throughput(cfg.comm_bandwidth[i], (*p_com[i])[n],
                                                   cfg.comm_ref_gain[i], d);
                    c11 = std::min(c11, rate - r_min);
                }
            }
            rep.entries[10] = entry(c11);
        } catch (const GeometryError&) {
            rep.entries[10] = {false, -kInf};
        }

        rep.entries[13] = entry(box(cfg.slave_look_angle_min, theta_2, cfg.slave_look_angle_max));
        rep.entries[14] = {true, 0.0}; // C15 holds by construction of theta_2
    }

    double c10 = kInf;
    for (const auto* p : {&s.resources.p_com_1, &s.resources.p_com_2})
        for (double pn : *p) c10 = std::min(c10, box(0.0, pn, cfg.comm_power_max));
    rep.entries[9] = entry(c10);

    double c12 = kInf;
    const std::vector<double>* p_com[2] = {&s.resources.p_com_1, &s.resources.p_com_2};
    for (int i = 0; i < 2; ++i) {
        const double e = total_energy(*p_com[i], v, cfg.radar_tx_power[i], cfg, dc);
        c12 = std::min(c12, cfg.battery_capacity[i] - e);
    }
    rep.entries[11] = entry(c12);

    double c13 = kInf;
    for (double vn : v) c13 = std::min(c13, box(cfg.velocity_min, vn, cfg.velocity_max));
    rep.entries[12] = entry(c13);

    return rep;
}

bool resources_feasible(const DecisionState& s, const ScenarioConfig& cfg,
                        const DerivedConstants& dc, double tol) {
    const ConstraintReport rep = evaluate_constraints(s, cfg, dc);
    for (int c : {6, 10, 11, 12, 13})
        if (rep.at(c).margin < -tol) return false;
    return true;
}

void relax_link_powers(DecisionState& s, const ScenarioConfig& cfg, const DerivedConstants& dc) {
    std::vector<double>* powers[2] = {&s.resources.p_com_1, &s.resources.p_com_2};
    for (int i = 0; i < 2; ++i) {
        std::vector<double>& p = *powers[i];
        const double used = total_energy(p, s.resources.v_y, cfg.radar_tx_power[i], cfg, dc);
        const double slack = cfg.battery_capacity[i] - used;
        if (slack <= 0.0) continue;
        double extra = 0.0;
        std::vector<double> lifted(p.size());
        for (std::size_t n = 0; n < p.size(); ++n) {
            lifted[n] = p[n] + 0.5 * (cfg.comm_power_max - p[n]);
            extra += (lifted[n] - p[n]) * cfg.slot_duration;
        }
        const double scale = extra > 0.9 * slack ? 0.9 * slack / extra : 1.0;
        for (std::size_t n = 0; n < p.size(); ++n) p[n] += scale * (lifted[n] - p[n]);
    }
}

SlaveContext SlaveContext::make(const ScenarioConfig& cfg, const DerivedConstants& dc,
                                const AcrossTrackPosition& q1, std::vector<double> v_y,
                                std::vector<double> p_com_2, std::optional<double> slave_pin) {
    SlaveContext ctx;
    ctx.cfg = &cfg;
    ctx.dc = &dc;
    ctx.q1 = q1;
    ctx.slave_pin = slave_pin;
    ctx.v_y = std::move(v_y);
    ctx.p_com_2 = std::move(p_com_2);
    ctx.r1 = slant_range(q1, cfg.target_x);
    ctx.master_inv_snr_unit =
        ctx.r1 * ctx.r1 * ctx.r1 * std::sin(cfg.master_look_angle) / dc.gamma_r[0];
    ctx.y = along_track_positions(ctx.v_y, cfg.slot_duration);
    ctx.ygs_sq.reserve(ctx.y.size());
    for (double yn : ctx.y) {
        const double d = yn - cfg.gs_position.y;
        ctx.ygs_sq.push_back(d * d);
    }
    ctx.dphi90_worst = delta_phi_90_cached(worst_case_coherence(cfg), cfg.n_looks);
    ctx.master_swath = footprint_bounds(q1, cfg.master_look_angle, cfg.beamwidth_3db);
    return ctx;
}

double context_coverage(const AcrossTrackPosition& q2, const SlaveContext& ctx) {
    const ScenarioConfig& cfg = *ctx.cfg;
    double swath = 0.0;
    if (q2.z > 0.0) {
        try {
            const double look = ctx.slave_pin ? *ctx.slave_pin : slave_look_angle(q2, cfg.target_x);
            const SwathBounds s = footprint_bounds(q2, look, cfg.beamwidth_3db);
            swath = std::max(std::min(ctx.master_swath.far, s.far) -
                                 std::max(ctx.master_swath.near, s.near),
                             0.0);
        } catch (const GeometryError&) {
            swath = 0.0; // grazing slave footprint covers nothing usable
        }
    }
    return coverage_from_swath(swath, ctx.v_y, cfg.slot_duration);
}

PenaltySet violation_penalties(const AcrossTrackPosition& q2, const SlaveContext& ctx) {
    const ScenarioConfig& cfg = *ctx.cfg;
    const DerivedConstants& dc = *ctx.dc;
    PenaltySet g;
    auto clamp_pos = [](double x) { return x > 0.0 ? x : 0.0; };

    if (q2.z <= 0.0) {
        // outside any meaningful geometry; dominated by the altitude box the
        // swarm enforces, but keep the scoring total and finite
        g.g3 = clamp_pos(std::hypot(q2.x - cfg.target_x, q2.z) - ctx.r1);
        g.g5 = clamp_pos(cfg.baseline_min - std::hypot(q2.x - ctx.q1.x, q2.z - ctx.q1.z));
        g.g6 = cfg.gamma_snr_min * static_cast<double>(ctx.v_y.size());
        g.g7 = cfg.gamma_rg_min;
        g.g14 = cfg.slave_look_angle_min;
        return g;
    }

    const double r2 = slant_range(q2, cfg.target_x);
    const double theta_2 = ctx.slave_pin ? *ctx.slave_pin : slave_look_angle(q2, cfg.target_x);
    g.g3 = clamp_pos(r2 - ctx.r1);

    const FormationState f{ctx.q1, q2, ctx.slave_pin};
    const auto base = baseline_components(f, cfg.master_look_angle);
    g.g5 = clamp_pos(cfg.baseline_min - base.b);

    const double unit2 = r2 * r2 * r2 * std::sin(theta_2) / dc.gamma_r[1];
    for (double vn : ctx.v_y)
        g.g6 += clamp_pos(cfg.gamma_snr_min -
                          snr_decorrelation(vn * ctx.master_inv_snr_unit, vn * unit2));

    g.g7 = clamp_pos(cfg.gamma_rg_min -
                     baseline_decorrelation(theta_2, cfg.master_look_angle, dc.fractional_bandwidth));

    if (base.b_perp > 0.0) {
        const double h_amb =
            height_of_ambiguity(cfg.wavelength, ctx.r1, cfg.master_look_angle, base.b_perp);
        g.g8 = clamp_pos(cfg.hoa_min - h_amb);
        g.g9 = clamp_pos(relative_height_error(h_amb, ctx.dphi90_worst) - cfg.height_error_max);
    } else {
        g.g9 = kInf; // no across-track sensitivity: C9 cannot hold
    }

    const double r_min = capped_min_data_rate(q2.z, theta_2, cfg);
    const double c0 = (q2.x - cfg.gs_position.x) * (q2.x - cfg.gs_position.x) +
                      (q2.z - cfg.gs_position.z) * (q2.z - cfg.gs_position.z);
    for (std::size_t n = 0; n < ctx.v_y.size(); ++n) {
        const double rate = cfg.comm_bandwidth[1] *
                            std::log2(1.0 + ctx.p_com_2[n] * cfg.comm_ref_gain[1] /
                                                (c0 + ctx.ygs_sq[n]));
        g.g11 += clamp_pos(r_min - rate);
    }

    g.g14 = clamp_pos(cfg.slave_look_angle_min - theta_2) +
            clamp_pos(theta_2 - cfg.slave_look_angle_max);
    return g;
}

double fitness(const AcrossTrackPosition& q2, SlaveContext& ctx) {
    const double cov = context_coverage(q2, ctx);
    ctx.min_coverage_seen = std::min(ctx.min_coverage_seen, cov);
    const PenaltySet g = violation_penalties(q2, ctx);
    const double total = g.sum();
    if (total == 0.0) return cov;
    return ctx.min_coverage_seen - total;
}

} // namespace uavinsar
