#include "uavinsar/ao_driver.hpp"

#include <algorithm>
#include <cmath>

namespace uavinsar {

namespace {

constexpr double kPi = 3.14159265358979323846;

DecisionState make_initial(const ScenarioConfig& cfg, AcrossTrackPosition q1,
                           AcrossTrackPosition q2) {
    DecisionState s;
    s.formation = {q1, q2, std::nullopt};
    const double p78 = std::pow(10.0, 7.78 / 10.0); // 7.78 dB
    const double p0 = std::min(p78, cfg.comm_power_max);
    s.resources.v_y.assign(cfg.n_slots, 4.0);
    s.resources.p_com_1.assign(cfg.n_slots, p0);
    s.resources.p_com_2.assign(cfg.n_slots, p0);
    return s;
}

double state_coverage(const DecisionState& s, const ScenarioConfig& cfg) {
    try {
        return coverage(s.formation, cfg.target_x, cfg.master_look_angle, cfg.beamwidth_3db,
                        s.resources.v_y, cfg.slot_duration);
    } catch (const GeometryError&) {
        return 0.0;
    }
}

double velocity_sum(std::span<const double> v) {
    double s = 0.0;
    for (std::size_t n = 0; n + 1 < v.size(); ++n) s += v[n];
    return s;
}

// C11-minimal powers for a fixed state, with a hair of slack.
void set_min_link_powers(DecisionState& s, const ScenarioConfig& cfg) {
    const auto y = along_track_positions(s.resources.v_y, cfg.slot_duration);
    const AcrossTrackPosition pos[2] = {s.formation.master, s.formation.slave};
    std::vector<double>* out[2] = {&s.resources.p_com_1, &s.resources.p_com_2};
    for (int i = 0; i < 2; ++i) {
        try {
            const double look = i == 0 ? cfg.master_look_angle
                                       : effective_slave_look_angle(s.formation, cfg.target_x);
            const double r_min = min_data_rate(pos[i].z, look, cfg);
            for (int n = 0; n < cfg.n_slots; ++n) {
                const double d = gs_distance(pos[i], y[n], cfg.gs_position);
                const double p = min_power_for_rate(r_min, cfg.comm_bandwidth[i],
                                                    cfg.comm_ref_gain[i], d * d);
                (*out[i])[n] = std::min(p * (1.0 + 1e-9), cfg.comm_power_max);
            }
        } catch (const GeometryError&) {
            // grazing: keep the current powers; the formation rounds fix it
        }
    }
}

// Deterministic slave placement inside the height-accuracy window: slightly
// shorter slant range than the master, look angle offset so the perpendicular
// baseline lands mid-window. Used to warm-start the repair PSO, whose
// feasible pocket is far too small a target for uniform initialization.
AcrossTrackPosition analytic_slave_guess(const AcrossTrackPosition& q1, const ScenarioConfig& cfg,
                                         double dphi90_worst) {
    const double r1 = slant_range(q1, cfg.target_x);
    const double r2 = 0.95 * r1;
    const double hoa_cap = cfg.height_error_max * 2.0 * 3.14159265358979323846 / dphi90_worst;
    const double lam_sin = cfg.wavelength * std::sin(cfg.master_look_angle);
    const double b_perp = r1 * lam_sin * 0.5 * (1.0 / cfg.hoa_min + 1.0 / std::max(hoa_cap, cfg.hoa_min));
    const double delta = std::asin(std::min(0.9, b_perp / r2));
    const double theta_2 = std::clamp(cfg.master_look_angle - delta,
                                      cfg.slave_look_angle_min + 0.01,
                                      cfg.slave_look_angle_max - 0.01);
    return {cfg.target_x - r2 * std::sin(theta_2),
            std::clamp(r2 * std::cos(theta_2), cfg.altitude_min, cfg.altitude_max)};
}

// One slave-placement pass followed by a master pass, used during repair.
// Unlike the AO iteration proper, the slave update is kept even when the
// best particle is still penalized: it moves the state toward feasibility.
void formation_round(DecisionState& s, const ScenarioConfig& cfg, const DerivedConstants& dc,
                     const AoOptions& opts, std::uint64_t seed) {
    SlaveContext sctx = SlaveContext::make(cfg, dc, s.formation.master, s.resources.v_y,
                                           s.resources.p_com_2, s.formation.slave_look_pin);
    // warm-start with the incumbent while it is feasible, otherwise with the
    // constructed in-window placement
    AcrossTrackPosition warm = s.formation.slave;
    if (violation_penalties(warm, sctx).sum() > 0.0 && !s.formation.slave_look_pin)
        warm = analytic_slave_guess(s.formation.master, cfg, sctx.dphi90_worst);
    const PsoResult pr = run_pso(sctx, opts.pso, seed, warm);
    s.formation.slave = pr.q2;

    MasterContext mctx =
        MasterContext::make(cfg, dc, s.formation, s.resources.v_y, s.resources.p_com_1);
    const PolyblockResult mr = optimize_master_altitude(mctx, cfg.eps_coverage, cfg.eps_bisection);
    if (mr.feasible) s.formation.master = mr.q1;
}

} // namespace

DecisionState initial_state_f1(const ScenarioConfig& cfg) {
    return make_initial(cfg, {-40.0, 60.0}, {-45.0, 50.0});
}

DecisionState initial_state_f2(const ScenarioConfig& cfg) {
    return make_initial(cfg, {-20.0, 40.0}, {-30.0, 40.0});
}

namespace {

// Largest along-track span both links can close at full power, from the
// C11 inversion P_max beta >= kappa (c0 + (y - g_y)^2).
double link_track_limit(const DecisionState& s, const ScenarioConfig& cfg) {
    double y_cap = std::numeric_limits<double>::infinity();
    const AcrossTrackPosition pos[2] = {s.formation.master, s.formation.slave};
    for (int i = 0; i < 2; ++i) {
        const double look = i == 0 ? cfg.master_look_angle
                                   : effective_slave_look_angle(s.formation, cfg.target_x);
        const double r_min = min_data_rate(pos[i].z, look, cfg);
        const double kappa = std::exp2(r_min / cfg.comm_bandwidth[i]) - 1.0;
        const double dx = pos[i].x - cfg.gs_position.x;
        const double dz = pos[i].z - cfg.gs_position.z;
        const double reach_sq = cfg.comm_power_max * cfg.comm_ref_gain[i] / kappa -
                                dx * dx - dz * dz;
        if (reach_sq <= 0.0) return 0.0;
        y_cap = std::min(y_cap, std::sqrt(reach_sq) + cfg.gs_position.y);
    }
    return y_cap;
}

} // namespace

DecisionState repair_initial_state(const ScenarioConfig& cfg, const DerivedConstants& dc,
                                   DecisionState state, const AoOptions& opts, std::uint64_t seed) {
    // Formation first: the experiment initializations prescribe the velocity
    // profile, so the placement blocks absorb as much of the infeasibility as
    // they can before the velocity is touched at all.
    for (double& v : state.resources.v_y) v = std::clamp(v, cfg.velocity_min, cfg.velocity_max);
    for (int round = 0; round < 6; ++round) {
        set_min_link_powers(state, cfg);
        relax_link_powers(state, cfg, dc);
        if (evaluate_constraints(state, cfg, dc).all_satisfied()) return state;
        formation_round(state, cfg, dc, opts, derive_seed(seed, 900 + round));
        set_min_link_powers(state, cfg);
        relax_link_powers(state, cfg, dc);
        if (evaluate_constraints(state, cfg, dc).all_satisfied()) return state;
        if (round >= 2 && !opts.freeze_velocity) {
            // the formation alone cannot carry this profile: throttle under
            // the SNR cap, then shrink the track to what the links can close
            double cap = cfg.velocity_min;
            try {
                cap = c6_velocity_cap(state.formation, cfg, dc).value_or(cfg.velocity_min);
            } catch (const GeometryError&) {
            }
            for (double& v : state.resources.v_y)
                v = std::clamp(v, cfg.velocity_min, std::max(cfg.velocity_min, cap));
            try {
                // stay strictly inside the link reach so the minimum powers
                // keep a positive margin under the cap
                const double y_cap = 0.999 * link_track_limit(state, cfg);
                const auto y = along_track_positions(state.resources.v_y, cfg.slot_duration);
                if (y.back() > y_cap && y.back() > 0.0) {
                    const double scale = std::max(y_cap, 0.0) / y.back();
                    for (double& v : state.resources.v_y)
                        v = std::clamp(v * scale, cfg.velocity_min, cfg.velocity_max);
                }
            } catch (const GeometryError&) {
            }
        }
    }
    throw AoError("initial state repair failed: no feasible point found");
}

Solution run_ao(const ScenarioConfig& cfg, const DerivedConstants& dc, const AoOptions& opts,
                const DecisionState& init, std::uint64_t seed) {
    Solution sol;
    sol.seed = seed;

    DecisionState s = init;
    if (opts.pinned_look_angle) s.formation.slave_look_pin = *opts.pinned_look_angle;
    if (opts.repair_init && !evaluate_constraints(s, cfg, dc).all_satisfied())
        s = repair_initial_state(cfg, dc, s, opts, derive_seed(seed, 0xA0));

    double coverage_prev = state_coverage(s, cfg);
    sol.coverage_history.push_back(coverage_prev);
    sol.state_history.push_back(s);

    int stale_iterations = 0;
    for (int m = 1; m <= opts.max_outer; ++m) {
        sol.iterations = m;

        // --- (P.1.a): slave placement, warm-started penalty PSO -------------
        {
            SlaveContext sctx = SlaveContext::make(cfg, dc, s.formation.master, s.resources.v_y,
                                                   s.resources.p_com_2, s.formation.slave_look_pin);
            const PsoResult pr = run_pso(sctx, opts.pso, derive_seed(seed, m, 1),
                                         s.formation.slave);
            if (pr.feasible) s.formation.slave = pr.q2;
        }

        // --- (P.1.b): master altitude via polyblock --------------------------
        {
            MasterContext mctx =
                MasterContext::make(cfg, dc, s.formation, s.resources.v_y, s.resources.p_com_1);
            const PolyblockResult mr =
                optimize_master_altitude(mctx, cfg.eps_coverage, cfg.eps_bisection);
            if (mr.feasible) {
                DecisionState cand = s;
                cand.formation.master = mr.q1;
                if (state_coverage(cand, cfg) >= state_coverage(s, cfg) - 1e-9 &&
                    evaluate_constraints(cand, cfg, dc).all_satisfied())
                    s = cand;
            }
        }

        // --- (P.1.c): resources ------------------------------------------------
        if (opts.freeze_velocity) {
            DecisionState cand = s;
            set_min_link_powers(cand, cfg);
            relax_link_powers(cand, cfg, dc);
            if (resources_feasible(cand, cfg, dc)) s = cand;
        } else {
            const auto sctx = ScaContext::make(cfg, dc, s.formation);
            if (sctx && sctx->c6_feasible) {
                const auto u0 = induced_power_slack(s.resources.v_y, dc);
                const ScaResult sr = run_sca(*sctx, s.resources.v_y, u0, cfg.eps_sca);
                if (sr.feasible) {
                    const double sum_old = velocity_sum(s.resources.v_y);
                    DecisionState cand = s;
                    cand.resources.p_com_1 = sr.final.p_com_1;
                    cand.resources.p_com_2 = sr.final.p_com_2;

                    // Velocity step rule: damp the update by psi when the
                    // blended profile with the new powers stays feasible,
                    // otherwise take the full SCA profile.
                    cand.resources.v_y.resize(s.resources.v_y.size());
                    for (std::size_t n = 0; n < cand.resources.v_y.size(); ++n)
                        cand.resources.v_y[n] = s.resources.v_y[n] +
                                                opts.psi * (sr.final.v_y[n] - s.resources.v_y[n]);
                    if (!resources_feasible(cand, cfg, dc)) cand.resources.v_y = sr.final.v_y;

                    if (velocity_sum(cand.resources.v_y) >= sum_old - 1e-12 &&
                        resources_feasible(cand, cfg, dc))
                        s = cand;
                }
            }
        }

        const double coverage_now = state_coverage(s, cfg);
        sol.coverage_history.push_back(coverage_now);
        sol.state_history.push_back(s);

        if (coverage_now > 0.0 &&
            std::abs(coverage_now - coverage_prev) / coverage_now <= cfg.eps_ao) {
            sol.converged = true;
            break;
        }
        stale_iterations = (coverage_now > coverage_prev + 1e-12) ? 0 : stale_iterations + 1;
        if (stale_iterations >= 3) {
            sol.status = "terminated: three iterations without coverage progress";
            sol.converged = true;
            break;
        }
        coverage_prev = coverage_now;
    }

    sol.state = s;
    sol.coverage = state_coverage(s, cfg);
    sol.report = evaluate_constraints(s, cfg, dc);
    sol.audit = audit_solution(s, cfg, dc);
    if (sol.status.empty())
        sol.status = sol.converged ? "converged" : "iteration limit reached";
    return sol;
}

PsiSearchResult search_psi(const ScenarioConfig& cfg, const DerivedConstants& dc,
                           const AoOptions& opts, const DecisionState& init, double eps5,
                           std::span<const std::uint64_t> seeds) {
    if (seeds.empty()) throw AoError("search_psi needs at least one seed");
    PsiSearchResult res;
    res.mean_coverage = -std::numeric_limits<double>::infinity();
    const int steps = static_cast<int>(std::floor(1.0 / eps5 + 1e-9));
    for (int k = 0; k <= steps; ++k) {
        const double psi = std::min(k * eps5, 1.0);
        AoOptions o = opts;
        o.psi = psi;
        double mean = 0.0;
        for (std::uint64_t seed : seeds) mean += run_ao(cfg, dc, o, init, seed).coverage;
        mean /= static_cast<double>(seeds.size());
        res.grid.emplace_back(psi, mean);
        if (mean > res.mean_coverage) { // strict: ties keep the smaller psi
            res.mean_coverage = mean;
            res.psi = psi;
        }
    }
    return res;
}

Solution run_benchmark(BenchmarkScheme scheme, const ScenarioConfig& cfg,
                       const DerivedConstants& dc, const AoOptions& opts,
                       const DecisionState& init, std::uint64_t seed) {
    AoOptions o = opts;
    DecisionState start = init;
    switch (scheme) {
    case BenchmarkScheme::proposed:
        break;
    case BenchmarkScheme::classical_ao:
        o.psi = 1.0;
        break;
    case BenchmarkScheme::fixed_steady_speed:
        o.freeze_velocity = true;
        std::fill(start.resources.v_y.begin(), start.resources.v_y.end(), 4.0);
        break;
    case BenchmarkScheme::fixed_slave_look_angle:
        o.pinned_look_angle = kPi / 4.0;
        break;
    }
    return run_ao(cfg, dc, o, start, seed);
}

double coverage_upper_bound(const ScenarioConfig& cfg) {
    const AcrossTrackPosition q_max{
        master_x_from_altitude(cfg.altitude_max, cfg.target_x, cfg.master_look_angle),
        cfg.altitude_max};
    const SwathBounds b = footprint_bounds(q_max, cfg.master_look_angle, cfg.beamwidth_3db);
    return (b.far - b.near) * (cfg.n_slots - 1) * cfg.velocity_max * cfg.slot_duration;
}

MetricAudit audit_solution(const DecisionState& s, const ScenarioConfig& cfg,
                           const DerivedConstants& dc) {
    MetricAudit a;
    const auto base = baseline_components(s.formation, cfg.master_look_angle);
    a.baseline = base.b;
    a.perp_baseline = base.b_perp;
    a.slant_range = {slant_range(s.formation.master, cfg.target_x),
                     slant_range(s.formation.slave, cfg.target_x)};
    const double dphi = delta_phi_90_cached(worst_case_coherence(cfg), cfg.n_looks);
    if (base.b_perp > 0.0) {
        a.hoa = height_of_ambiguity(cfg.wavelength, a.slant_range[0], cfg.master_look_angle,
                                    base.b_perp);
        a.height_error_worst = relative_height_error(a.hoa, dphi);
    } else {
        a.hoa = std::numeric_limits<double>::infinity();
        a.height_error_worst = std::numeric_limits<double>::infinity();
    }
    try {
        a.slave_look_angle = effective_slave_look_angle(s.formation, cfg.target_x);
        a.gamma_rg = baseline_decorrelation(a.slave_look_angle, cfg.master_look_angle,
                                            dc.fractional_bandwidth);
        a.swath = usable_swath(s.formation, cfg.target_x, cfg.master_look_angle, cfg.beamwidth_3db);
        a.data_rate_min = {min_data_rate(s.formation.master.z, cfg.master_look_angle, cfg),
                           min_data_rate(s.formation.slave.z, a.slave_look_angle, cfg)};
        double gmin = std::numeric_limits<double>::infinity();
        for (double v : s.resources.v_y)
            gmin = std::min(gmin, snr_decorrelation(s.formation, cfg.target_x,
                                                    cfg.master_look_angle, v, dc));
        a.gamma_snr_min_slot = gmin;
    } catch (const GeometryError&) {
        // leave the affected entries at zero for degenerate formations
    }
    a.mean_velocity = velocity_sum(s.resources.v_y) / (cfg.n_slots - 1);
    const auto ledger =
        energy_ledger(s.resources.p_com_1, s.resources.p_com_2, s.resources.v_y, cfg, dc);
    a.energy = ledger.total;
    return a;
}

} // namespace uavinsar
