#include "uavinsar/opt_sca.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace uavinsar {

namespace {

// Relative slack folded into the recovered C11-minimal powers so the final
// iterate passes the throughput constraint with a strictly positive margin.
constexpr double kPowerSlack = 1.0 + 1e-9;

struct Margins {
    std::vector<double> v_lo, v_hi, u_lo, c12a;       // per slot
    std::array<std::vector<double>, 2> c11;           // per UAV per slot
    std::array<double, 2> energy = {0.0, 0.0};        // per UAV
    bool positive = false;
};

// Smooth convex program in x = [v; u] after eliminating the communication
// powers: P_com,i[k] is pinned at the C11-minimal level (any excess only
// burns energy), which leaves boxes, the linearized C12a slack constraint,
// the per-slot power caps, and the two energy budgets.
struct Model {
    const ConvexSubproblem* sub;
    const ScenarioConfig* cfg;
    const DerivedConstants* dc;
    int n;
    double dt, v_min, v_cap, u_tip, c_para, v0_4;
    std::array<double, 2> kb; // kappa_i * kPowerSlack / beta_i [W per m^2]

    explicit Model(const ConvexSubproblem& s)
        : sub(&s), cfg(s.ctx->cfg), dc(s.ctx->dc), n(cfg->n_slots), dt(cfg->slot_duration) {
        v_min = cfg->velocity_min;
        v_cap = s.ctx->v_cap;
        u_tip = cfg->tip_speed;
        c_para = 0.5 * cfg->fuselage_drag_ratio * cfg->air_density * cfg->rotor_solidity *
                 cfg->rotor_disc_area;
        const double v0 = dc->rotor_induced_velocity;
        v0_4 = v0 * v0 * v0 * v0;
        for (int i = 0; i < 2; ++i)
            kb[i] = s.ctx->kappa[i] * kPowerSlack / cfg->comm_ref_gain[i];
    }

    std::vector<double> along_track(std::span<const double> v) const {
        std::vector<double> y(n, 0.0);
        for (int k = 1; k < n; ++k) y[k] = y[k - 1] + v[k - 1] * dt;
        return y;
    }

    double p_req(int i, double y_k) const {
        const double e = y_k - cfg->gs_position.y;
        return kb[i] * (sub->ctx->c0[i] + e * e);
    }

    double blade_power(double v) const {
        return dc->blade_profile_power * (1.0 + 3.0 * v * v / (u_tip * u_tip));
    }

    Margins margins(std::span<const double> v, std::span<const double> u) const {
        Margins m;
        m.v_lo.resize(n);
        m.v_hi.resize(n);
        m.u_lo.resize(n);
        m.c12a.resize(n);
        const auto y = along_track(v);
        for (int k = 0; k < n; ++k) {
            m.v_lo[k] = v[k] - v_min;
            m.v_hi[k] = v_cap - v[k];
            m.u_lo[k] = u[k];
            const double v2 = v[k] * v[k];
            m.c12a[k] = sub->c12a[k].value(v[k], u[k]) - 1.0 - v2 * v2 / (4.0 * v0_4);
        }
        for (int i = 0; i < 2; ++i) {
            m.c11[i].resize(n);
            double energy_sum = 0.0;
            for (int k = 0; k < n; ++k) {
                const double preq = p_req(i, y[k]);
                m.c11[i][k] = cfg->comm_power_max - preq;
                energy_sum += blade_power(v[k]) + u[k] + c_para * v[k] * v[k] * v[k] +
                              cfg->radar_tx_power[i] + preq;
            }
            m.energy[i] = cfg->battery_capacity[i] - dt * energy_sum;
        }
        m.positive = true;
        auto check = [&m](const std::vector<double>& xs) {
            for (double x : xs)
                if (!(x > 0.0)) m.positive = false;
        };
        check(m.v_lo);
        check(m.v_hi);
        check(m.u_lo);
        check(m.c12a);
        check(m.c11[0]);
        check(m.c11[1]);
        if (!(m.energy[0] > 0.0) || !(m.energy[1] > 0.0)) m.positive = false;
        return m;
    }

    double barrier(std::span<const double> v, std::span<const double> u, double t_bar) const {
        const Margins m = margins(v, u);
        if (!m.positive) return std::numeric_limits<double>::infinity();
        double obj = 0.0;
        for (int k = 0; k < n; ++k) obj += sub->objective_weight[k] * v[k];
        double logs = 0.0;
        for (int k = 0; k < n; ++k)
            logs += std::log(m.v_lo[k]) + std::log(m.v_hi[k]) + std::log(m.u_lo[k]) +
                    std::log(m.c12a[k]);
        for (int i = 0; i < 2; ++i) {
            for (int k = 0; k < n; ++k) logs += std::log(m.c11[i][k]);
            logs += std::log(m.energy[i]);
        }
        return -t_bar * obj - logs;
    }

    // barrier(x2) - barrier(x1) in difference form. The raw barrier value is
    // O(t_bar * objective); near convergence the per-step change is ~1e-10 of
    // that, far below double resolution of the absolute values. Log-ratios of
    // margins keep every term fully resolved.
    double barrier_delta(std::span<const double> v1, std::span<const double> u1,
                         std::span<const double> v2, std::span<const double> u2,
                         double t_bar) const {
        const Margins m1 = margins(v1, u1);
        const Margins m2 = margins(v2, u2);
        if (!m2.positive) return std::numeric_limits<double>::infinity();
        double obj_delta = 0.0;
        for (int k = 0; k < n; ++k) obj_delta += sub->objective_weight[k] * (v2[k] - v1[k]);
        double logs = 0.0;
        for (int k = 0; k < n; ++k)
            logs += std::log(m1.v_lo[k] / m2.v_lo[k]) + std::log(m1.v_hi[k] / m2.v_hi[k]) +
                    std::log(m1.u_lo[k] / m2.u_lo[k]) + std::log(m1.c12a[k] / m2.c12a[k]);
        for (int i = 0; i < 2; ++i) {
            for (int k = 0; k < n; ++k) logs += std::log(m1.c11[i][k] / m2.c11[i][k]);
            logs += std::log(m1.energy[i] / m2.energy[i]);
        }
        return -t_bar * obj_delta + logs;
    }

    // Gradient and Hessian of the barrier. The distance constraints couple
    // velocities through the prefix sums y[k]; their curvature acts on
    // prefix blocks 1_{j<k} 1_{j'<k}^T and is assembled from suffix partial
    // sums in O(n^2).
    void derivatives(std::span<const double> v, std::span<const double> u, double t_bar,
                     const Margins& m, Eigen::VectorXd& grad, Eigen::MatrixXd& hess) const {
        const int dim = 2 * n;
        grad.setZero(dim);
        hess.setZero(dim, dim);
        const auto y = along_track(v);

        for (int k = 0; k < n; ++k) grad[k] -= t_bar * sub->objective_weight[k];

        // velocity and slack boxes
        for (int k = 0; k < n; ++k) {
            grad[k] += -1.0 / m.v_lo[k] + 1.0 / m.v_hi[k];
            hess(k, k) += 1.0 / (m.v_lo[k] * m.v_lo[k]) + 1.0 / (m.v_hi[k] * m.v_hi[k]);
            grad[n + k] += -1.0 / m.u_lo[k];
            hess(n + k, n + k) += 1.0 / (m.u_lo[k] * m.u_lo[k]);
        }

        // linearized C12a
        for (int k = 0; k < n; ++k) {
            const double av = sub->c12a[k].gv - v[k] * v[k] * v[k] / v0_4;
            const double au = sub->c12a[k].gu;
            const double mk = m.c12a[k];
            grad[k] += -av / mk;
            grad[n + k] += -au / mk;
            hess(k, k) += av * av / (mk * mk) + 3.0 * v[k] * v[k] / (v0_4 * mk);
            hess(n + k, n + k) += au * au / (mk * mk);
            hess(k, n + k) += av * au / (mk * mk);
            hess(n + k, k) += av * au / (mk * mk);
        }

        // per-slot power caps: margin Pmax - kb (c0 + e_k^2), gradient
        // -2 kb e_k dt on {j < k}
        {
            std::vector<double> gsuffix(n + 1, 0.0);
            std::vector<double> csuffix(n + 1, 0.0);
            for (int k = n - 1; k >= 1; --k) {
                const double e = y[k] - cfg->gs_position.y;
                double gk = 0.0, ck = 0.0;
                for (int i = 0; i < 2; ++i) {
                    const double mc = m.c11[i][k];
                    const double dm = 2.0 * kb[i] * e * dt; // |d margin / d v_j|
                    gk += dm / mc;
                    ck += dm * dm / (mc * mc) + 2.0 * kb[i] * dt * dt / mc;
                    ck += 2.0 * kb[i] * dt * dt / m.energy[i]; // energy y-curvature
                }
                gsuffix[k] = gsuffix[k + 1] + gk;
                csuffix[k] = csuffix[k + 1] + ck;
            }
            for (int j = 0; j < n; ++j) {
                grad[j] += gsuffix[j + 1];
                for (int jp = 0; jp <= j; ++jp) {
                    hess(j, jp) += csuffix[j + 1];
                    if (jp != j) hess(jp, j) += csuffix[j + 1];
                }
            }
        }

        // energy budgets: full gradient vector (rank-one Hessian term) plus
        // the diagonal propulsion curvature
        for (int i = 0; i < 2; ++i) {
            const double me = m.energy[i];
            Eigen::VectorXd ge = Eigen::VectorXd::Zero(dim);
            double esuffix = 0.0; // sum_{k > j} 2 e_k
            for (int j = n - 1; j >= 0; --j) {
                if (j + 1 < n) esuffix += 2.0 * (y[j + 1] - cfg->gs_position.y);
                const double dprop = 6.0 * dc->blade_profile_power * v[j] / (u_tip * u_tip) +
                                     3.0 * c_para * v[j] * v[j];
                ge[j] = -dt * dprop - kb[i] * dt * dt * esuffix;
                ge[n + j] = -dt;
            }
            grad -= ge / me;
            hess += (ge * ge.transpose()) / (me * me);
            for (int j = 0; j < n; ++j)
                hess(j, j) += dt * (6.0 * dc->blade_profile_power / (u_tip * u_tip) +
                                    6.0 * c_para * v[j]) / me;
        }
    }
};

} // namespace

std::optional<double> c6_velocity_cap(const FormationState& f, const ScenarioConfig& cfg,
                                      const DerivedConstants& dc) {
    const double theta_2 = effective_slave_look_angle(f, cfg.target_x);
    const double r1 = slant_range(f.master, cfg.target_x);
    const double r2 = slant_range(f.slave, cfg.target_x);
    const double s1 = r1 * r1 * r1 * std::sin(cfg.master_look_angle) / dc.gamma_r[0];
    const double s2 = r2 * r2 * r2 * std::sin(theta_2) / dc.gamma_r[1];
    const double rhs = 1.0 / (cfg.gamma_snr_min * cfg.gamma_snr_min) - 1.0;
    double root;
    if (s1 <= 0.0 && s2 <= 0.0) {
        root = std::numeric_limits<double>::infinity();
    } else if (s1 * s2 == 0.0) {
        root = rhs / (s1 + s2);
    } else {
        // positive root of (1 + s1 v)(1 + s2 v) = 1 / gamma_min^2
        const double a = s1 * s2;
        const double b = s1 + s2;
        root = (-b + std::sqrt(b * b + 4.0 * a * rhs)) / (2.0 * a);
    }
    const double cap = std::min(root, cfg.velocity_max);
    if (cap < cfg.velocity_min) return std::nullopt;
    return cap;
}

C12aLinearization linearize_c12a(double v, double u, const DerivedConstants& dc) {
    C12aLinearization lin;
    lin.v0 = v;
    lin.u0 = u;
    const double pi2 = dc.induced_power_hover * dc.induced_power_hover;
    const double v02 = dc.rotor_induced_velocity * dc.rotor_induced_velocity;
    const double inner = u * u / pi2 + v * v / (2.0 * v02);
    lin.f0 = inner * inner;
    lin.gu = 4.0 * inner * u / pi2;
    lin.gv = 2.0 * inner * v / v02;
    return lin;
}

std::vector<C12aLinearization> linearize_c12a(std::span<const double> v, std::span<const double> u,
                                              const DerivedConstants& dc) {
    std::vector<C12aLinearization> out;
    out.reserve(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) out.push_back(linearize_c12a(v[k], u[k], dc));
    return out;
}

std::optional<ScaContext> ScaContext::make(const ScenarioConfig& cfg, const DerivedConstants& dc,
                                           const FormationState& f) {
    ScaContext ctx;
    ctx.cfg = &cfg;
    ctx.dc = &dc;
    ctx.formation = f;
    try {
        ctx.swath = usable_swath(f, cfg.target_x, cfg.master_look_angle, cfg.beamwidth_3db);
        const double theta_2 = effective_slave_look_angle(f, cfg.target_x);
        const double look[2] = {cfg.master_look_angle, theta_2};
        const AcrossTrackPosition pos[2] = {f.master, f.slave};
        for (int i = 0; i < 2; ++i) {
            ctx.r_min[i] = min_data_rate(pos[i].z, look[i], cfg);
            ctx.kappa[i] = std::exp2(ctx.r_min[i] / cfg.comm_bandwidth[i]) - 1.0;
            const double dx = pos[i].x - cfg.gs_position.x;
            const double dz = pos[i].z - cfg.gs_position.z;
            ctx.c0[i] = dx * dx + dz * dz;
        }
    } catch (const GeometryError&) {
        return std::nullopt;
    }
    const auto cap = c6_velocity_cap(f, cfg, dc);
    ctx.c6_feasible = cap.has_value();
    ctx.v_cap = cap.value_or(0.0);
    return ctx;
}

ConvexSubproblem build_subproblem(const ScaContext& ctx, std::span<const double> v,
                                  std::span<const double> u) {
    ConvexSubproblem sub;
    sub.ctx = &ctx;
    sub.c12a = linearize_c12a(v, u, *ctx.dc);
    const int n = ctx.cfg->n_slots;
    sub.objective_weight.assign(n, 1.0);
    // the last slot does not enter the coverage sum; a small positive weight
    // keeps its optimum well defined at the velocity cap
    sub.objective_weight[n - 1] = 1e-2;
    return sub;
}

std::vector<double> induced_power_slack(std::span<const double> v, const DerivedConstants& dc) {
    std::vector<double> u;
    u.reserve(v.size());
    for (double vk : v) u.push_back(induced_power(vk, dc));
    return u;
}

SolveStatus solve_convex(const ConvexSubproblem& sub, std::optional<ScaIterate> warm_start) {
    SolveStatus st;
    const ScaContext& ctx = *sub.ctx;
    const ScenarioConfig& cfg = *ctx.cfg;
    const Model model(sub);
    const int n = model.n;

    if (!ctx.c6_feasible) {
        st.message = "C6 velocity cap below v_min";
        return st;
    }

    // --- strictly feasible start -------------------------------------------
    const double span = ctx.v_cap - cfg.velocity_min;
    const double pad = std::min(1e-6, 0.25 * span);
    auto clamp_v = [&](double x) { return std::clamp(x, cfg.velocity_min + pad, ctx.v_cap - pad); };
    std::vector<double> v(n, cfg.velocity_min + pad), u(n);
    if (warm_start)
        for (int k = 0; k < n; ++k) v[k] = clamp_v(warm_start->v_y[k]);

    auto lift_u = [&](std::vector<double>& uu) {
        for (int k = 0; k < n; ++k) {
            const auto& lin = sub.c12a[k];
            const double v2 = v[k] * v[k];
            const double need = 1.0 + v2 * v2 / (4.0 * model.v0_4);
            double cand = induced_power(v[k], *model.dc) * (1.0 + 1e-7) + 1e-9;
            if (lin.gu > 1e-12) {
                const double from_lin = lin.u0 + (need - lin.f0 - lin.gv * (v[k] - lin.v0)) / lin.gu;
                cand = std::max(cand, from_lin * (1.0 + 1e-9) + 1e-9);
            }
            uu[k] = std::max(cand, 1e-9);
        }
    };
    lift_u(u);
    Margins m = model.margins(v, u);
    if (!m.positive) {
        std::fill(v.begin(), v.end(), cfg.velocity_min + pad); // slowest profile fallback
        lift_u(u);
        m = model.margins(v, u);
        if (!m.positive) {
            st.message = "no strictly feasible start (C11 power cap or energy budget)";
            return st;
        }
    }

    // --- barrier loop --------------------------------------------------------
    const int n_constraints = 6 * n + 2;
    double t_bar = 1.0;
    Eigen::VectorXd grad;
    Eigen::MatrixXd hess;

    std::vector<double> v_try(n), u_try(n);
    while (true) {
        for (int newton = 0; newton < 60; ++newton) {
            m = model.margins(v, u);
            model.derivatives(v, u, t_bar, m, grad, hess);
            // Jacobi scaling: the velocity and slack blocks live on scales
            // ~18 orders apart near the boundary, which would wreck a plain
            // Cholesky solve at the later barrier stages.
            Eigen::VectorXd d = hess.diagonal().cwiseMax(1e-300).cwiseSqrt();
            Eigen::MatrixXd hs = d.cwiseInverse().asDiagonal() * hess *
                                 d.cwiseInverse().asDiagonal();
            hs.diagonal().array() += 1e-14;
            const Eigen::VectorXd gs = grad.cwiseQuotient(d);
            Eigen::LLT<Eigen::MatrixXd> llt(hs);
            Eigen::VectorXd step;
            if (llt.info() == Eigen::Success) {
                step = llt.solve(-gs).cwiseQuotient(d);
            } else {
                Eigen::MatrixXd h2 = hs;
                h2.diagonal().array() += 1e-8;
                step = h2.ldlt().solve(-gs).cwiseQuotient(d);
            }
            const double decrement = -grad.dot(step);
            if (decrement / 2.0 < 1e-13) break;

            double alpha = 1.0;
            for (int ls = 0; ls < 60; ++ls) {
                for (int k = 0; k < n; ++k) {
                    v_try[k] = v[k] + alpha * step[k];
                    u_try[k] = u[k] + alpha * step[n + k];
                }
                if (model.barrier_delta(v, u, v_try, u_try, t_bar) <
                    -1e-4 * alpha * decrement)
                    break;
                alpha *= 0.5;
            }
            v = v_try;
            u = u_try;
        }
        if (n_constraints / t_bar < 3e-4) break;
        t_bar *= 20.0;
    }

    // --- recover the point ----------------------------------------------------
    m = model.margins(v, u);
    model.derivatives(v, u, t_bar, m, grad, hess);
    st.kkt_residual = grad.lpNorm<Eigen::Infinity>() / t_bar;

    st.point.v_y = v;
    st.point.u = u;
    st.point.p_com_1.resize(n);
    st.point.p_com_2.resize(n);
    const auto y = model.along_track(v);
    for (int k = 0; k < n; ++k) {
        st.point.p_com_1[k] = std::min(model.p_req(0, y[k]), cfg.comm_power_max);
        st.point.p_com_2[k] = std::min(model.p_req(1, y[k]), cfg.comm_power_max);
    }
    double along = 0.0;
    for (int k = 0; k + 1 < n; ++k) along += v[k];
    st.point.objective = ctx.swath * along * cfg.slot_duration;
    st.feasible = true;
    return st;
}

ScaResult run_sca(const ScaContext& ctx, std::span<const double> v_init,
                  std::span<const double> u_init, double eps3) {
    ScaResult res;
    std::vector<double> v(v_init.begin(), v_init.end());
    std::vector<double> u(u_init.begin(), u_init.end());
    std::optional<ScaIterate> warm = ScaIterate{v, u, {}, {}, 0.0};

    for (int i = 1; i <= kScaMaxIterations; ++i) {
        const ConvexSubproblem sub = build_subproblem(ctx, v, u);
        SolveStatus st = solve_convex(sub, warm);
        if (!st.feasible) {
            if (res.objective_history.empty()) {
                res.message = st.message;
                return res; // infeasible from the start
            }
            break; // keep the last good iterate
        }
        res.final = st.point;
        res.feasible = true;
        res.iterations = i;
        res.objective_history.push_back(st.point.objective);
        const std::size_t h = res.objective_history.size();
        if (h >= 2) {
            const double now = res.objective_history[h - 1];
            const double before = res.objective_history[h - 2];
            if (now == 0.0 || std::abs(now - before) / std::abs(now) < eps3) break;
        } else if (st.point.objective == 0.0) {
            break; // zero swath: nothing to iterate on
        }
        v = st.point.v_y;
        u = st.point.u;
        warm = st.point;
    }
    if (res.feasible) {
        // hand back an operating point with link-power headroom; every level
        // between the C11 minimum and the cap is optimal here, and headroom
        // keeps the next placement subproblems unanchored
        DecisionState s;
        s.formation = ctx.formation;
        s.resources = {res.final.v_y, res.final.p_com_1, res.final.p_com_2};
        relax_link_powers(s, *ctx.cfg, *ctx.dc);
        res.final.p_com_1 = s.resources.p_com_1;
        res.final.p_com_2 = s.resources.p_com_2;
    }
    return res;
}

} // namespace uavinsar
