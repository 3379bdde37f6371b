#include "adaptsim/scenarios.hpp"

#include <cmath>
#include <limits>
#include <memory>

#include "adaptsim/verify.hpp"

namespace adaptsim {

namespace {

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

/// Friction with the continuous extension Fs = 0 for x3 <= 0 and a hard stop
/// near the x3 -> 1 pole; the closed loops use this so RK4 stages brushing
/// x3 = 0 stay well defined.
double lugre_friction_guarded(const LugreParams& p, double x2, double x3, double theta) {
    if (theta <= 0.0 || x3 <= 0.0) return 0.0;
    if (x3 >= 0.999) throw SlipOutOfRange("slip reached the x3 -> 1 pole");
    return lugre_friction(p, x2, x3, theta);
}

Vec wheel_dynamics(const LugreParams& p, const Vec& x, double fs, double u) {
    const double x1 = x[0];
    const double bracket = (1.0 - x[2]) / p.m + p.r * p.r / p.J;
    return {-fs / p.m, (fs * p.r - u) / p.J, -(bracket * fs - (p.r / p.J) * u) / x1};
}

}  // namespace

double lugre_friction(const LugreParams& p, double x2, double x3, double theta) {
    if (x3 < 0.0 || x3 >= 1.0) throw SlipOutOfRange("slip outside [0, 1)");
    if (x3 == 0.0 || x2 == 0.0) return 0.0;
    const double g = theta * (p.muC + (p.muS - p.muC) *
                                          std::exp(-std::fabs(p.r * x2 * x3) /
                                                   (std::fabs(1.0 - x3) * p.vs)));
    const double a = p.sigma0 / p.L_patch;
    const double z = x3 / (1.0 - x3);
    return p.Fn * sgn(x2) * (a * g * z) / (a * z + g);
}

double optimal_slip(const LugreParams& p, double theta, double x2) {
    if (!(theta > 0.0)) throw Error("optimal_slip: theta must be positive");
    double best_x3 = 0.01;
    double best_f = -std::numeric_limits<double>::infinity();
    for (int i = 0;; ++i) {
        const double x3 = 0.01 + 1e-3 * i;
        if (x3 > 0.6 + 1e-12) break;
        const double f = lugre_friction(p, x2, x3, theta);
        if (f > best_f) {  // strict: ties keep the smallest slip
            best_f = f;
            best_x3 = x3;
        }
    }
    return best_x3;
}

double RoadProfile::theta_at(double s) const {
    for (const auto& piece : pieces)
        if (s <= piece.edge) return piece.theta;
    return pieces.back().theta;
}

int RoadProfile::segment_index(double s) const {
    for (std::size_t i = 0; i < pieces.size(); ++i)
        if (s <= pieces[i].edge) return static_cast<int>(i);
    return static_cast<int>(pieces.size()) - 1;
}

RoadProfile RoadProfile::braking_case() {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return {{{8.0, 0.3}, {16.0, 1.3}, {24.0, 0.7}, {32.0, 0.4}, {40.0, 1.5}, {inf, 0.6}}};
}

Vec wheel_rhs(const LugreParams& p, const Vec& x, double theta, double u) {
    if (x[0] <= 0.1) throw StoppedVehicle("wheel model evaluated at near-zero speed");
    return wheel_dynamics(p, x, lugre_friction(p, x[1], x[2], theta), u);
}

SlipLoopEval slip_control_loop_step(const LugreParams& p, const Vec& aug, const RoadProfile& road,
                                    double gamma, double x3_star_cached) {
    SlipLoopEval e;
    const double x1 = aug[0], x2 = aug[1], x3 = aug[2], xh3 = aug[3], s = aug[4], thI = aug[5];
    e.psi = xh3 - x3;
    e.theta_hat = gamma * (e.psi + thI);
    e.x3_star = x3_star_cached;
    e.theta_true = road.theta_at(s);

    const double bracket = (1.0 - x3) / p.m + p.r * p.r / p.J;
    const double fs_hat = lugre_friction_guarded(p, x2, x3, e.theta_hat);
    e.u = (p.J / p.r) * (bracket * fs_hat - p.Ks * x1 * (x3 - e.x3_star));
    e.dxhat3 = -(bracket * fs_hat - (p.r / p.J) * e.u) / x1 + (x3 - xh3);
    e.dtheta_I = e.psi;

    const double fs_true = lugre_friction_guarded(p, x2, x3, e.theta_true);
    e.mismatch = (bracket / x1) * (fs_true - fs_hat);
    return e;
}

double braking_distance(const Trace& trace) {
    if (!trace.stopped) throw NotTerminated("braking_distance: stop condition never fired");
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < trace.size(); ++i) {
        const double dt = trace.times[i + 1] - trace.times[i];
        s += 0.5 * dt * (trace.states[i][0] + trace.states[i + 1][0]);
    }
    return s;
}

int OmegaM::region(double x1) const {
    for (std::size_t i = 0; i < intervals.size(); ++i)
        if (x1 >= intervals[i].lo && x1 <= intervals[i].hi) return static_cast<int>(i);
    return -1;
}

double OmegaM::alpha(double x1) const {
    const int r = region(x1);
    return r < 0 ? 0.0 : intervals[static_cast<std::size_t>(r)].sign * x1;
}

OmegaM OmegaM::sine_default() {
    return {{{-3.38, -2.59, -1.0}, {-1.14, 1.14, 1.0}, {2.59, 3.38, -1.0}}};
}

Disturbance DisturbanceSpec::build() const {
    if (kind == "none") return Disturbance::zero();
    if (kind == "exp") return Disturbance::decaying_exponential(a, b);
    throw ConfigError("disturbance.kind must be 'none' or 'exp', got '" + kind + "'");
}

// ---------------------------------------------------------------------------

BuiltScenario build_spring(const SpringConfig& cfg) {
    if (!(cfg.k0 < 0.0)) throw ConfigError("spring.k0 must be negative");
    if (!(cfg.lambda > 0.0)) throw ConfigError("spring.lambda must be positive");

    BuiltScenario sc;
    sc.name = "spring";
    const double k0 = cfg.k0, lam = cfg.lambda;

    sc.plant.q = 1;
    sc.plant.p = 1;
    sc.plant.f1 = [](const Vec& x, double) -> Vec { return {x[1]}; };
    sc.plant.g1 = [](const Vec&, double) -> Vec { return {0.0}; };
    sc.plant.f2 = [k0](const Vec& x, const Vec& th, double) -> Vec {
        return {k0 * x[0] + th[0] * x[1] * std::fabs(x[1])};
    };
    sc.plant.g2 = [](const Vec&, double) -> Vec { return {1.0}; };
    sc.plant.theta_true = {cfg.theta};
    sc.plant.theta_domain = {{-2.0}, {2.0}};

    sc.goal.psi = [lam](const Vec& x, double) { return x[0] + lam * x[1]; };
    sc.goal.grad_x = [lam](const Vec&, double) -> Vec { return {1.0, lam}; };
    sc.goal.ddt = [](const Vec&, double) { return 0.0; };

    sc.target.omega = {cfg.omega};
    sc.target.phi = [](double psi, const Vec& om, double) { return om[0] * psi; };

    sc.parm.d = 1;
    sc.parm.f = [k0, lam](const Vec& x, const Vec& th, double) {
        return x[1] + lam * (k0 * x[0] + th[0] * x[1] * std::fabs(x[1]));
    };
    sc.parm.alpha = [](const Vec& x, double) -> Vec { return {x[1] * std::fabs(x[1])}; };
    sc.parm.alpha_jac_x = [](const Vec& x, double) {
        Mat j(1, 2);
        j(0, 1) = 2.0 * std::fabs(x[1]);
        return j;
    };
    sc.parm.alpha_dt = [](const Vec&, double) -> Vec { return {0.0}; };
    sc.parm.Psi = [lam](const Vec& x, double) -> Vec {
        const double ax = std::fabs(x[1]);
        return {x[0] * x[1] * ax + (2.0 * lam / 3.0) * ax * ax * ax};
    };
    sc.parm.Psi_jac_x = [lam](const Vec& x, double) {
        Mat j(1, 2);
        const double ax = std::fabs(x[1]);
        j(0, 0) = x[1] * ax;
        j(0, 1) = 2.0 * x[0] * ax + 2.0 * lam * x[1] * ax;
        return j;
    };
    sc.parm.Psi_dt = [](const Vec&, double) -> Vec { return {0.0}; };
    sc.parm.D = lam;
    sc.parm.D1 = lam;

    sc.Gamma = Mat::diag({cfg.gamma});
    sc.theta_hat0 = {cfg.theta_hat0};
    sc.t0 = cfg.t0;
    sc.tf = cfg.tf;
    sc.h = cfg.h;

    sc.x_grid = grid_points(Box{{-2.0, -2.0}, {2.0, 2.0}}, 15);
    sc.theta_pairs = theta_pair_grid(sc.plant.theta_domain, 20, 400);
    sc.realizability_probes = {{0.3, 0.7}, {-1.1, 0.4}, {1.5, -1.2}, {0.0, 0.0}};

    ClosedLoopSpec loop{sc.plant, sc.goal,      sc.target,       sc.parm,
                        sc.Gamma, sc.theta_hat0, cfg.eps.build(), nullptr};
    const Vec x0 = {cfg.x10, cfg.x20};
    const double t0 = cfg.t0, tf = cfg.tf, h = cfg.h;
    sc.run = [loop, x0, t0, tf, h]() { return run_closed_loop(loop, x0, t0, tf, h); };
    return sc;
}

BuiltScenario build_sine(const SineConfig& cfg) {
    if (cfg.theta < 0.6 || cfg.theta > 1.4)
        throw ConfigError("sine.theta must lie in [0.6, 1.4]");
    if (!(cfg.lambda > 0.0)) throw ConfigError("sine.lambda must be positive");

    BuiltScenario sc;
    sc.name = "sine";
    const double lam = cfg.lambda;
    const OmegaM om = OmegaM::sine_default();

    sc.plant.q = 1;
    sc.plant.p = 1;
    sc.plant.f1 = [](const Vec& x, double) -> Vec { return {x[1]}; };
    sc.plant.g1 = [](const Vec&, double) -> Vec { return {0.0}; };
    sc.plant.f2 = [](const Vec& x, const Vec& th, double) -> Vec {
        return {std::sin(th[0] * x[0])};
    };
    sc.plant.g2 = [](const Vec&, double) -> Vec { return {1.0}; };
    sc.plant.theta_true = {cfg.theta};
    sc.plant.theta_domain = {{0.6}, {1.4}};

    sc.goal.psi = [lam](const Vec& x, double) { return x[0] + lam * x[1]; };
    sc.goal.grad_x = [lam](const Vec&, double) -> Vec { return {1.0, lam}; };
    sc.goal.ddt = [](const Vec&, double) { return 0.0; };

    sc.target.omega = {cfg.omega};
    sc.target.phi = [](double psi, const Vec& omv, double) { return omv[0] * psi; };

    sc.parm.d = 1;
    sc.parm.f = [lam](const Vec& x, const Vec& th, double) {
        return x[1] + lam * std::sin(th[0] * x[0]);
    };
    sc.parm.alpha = [om](const Vec& x, double) -> Vec { return {om.alpha(x[0])}; };
    sc.parm.alpha_jac_x = [om](const Vec& x, double) {
        Mat j(1, 2);
        const int r = om.region(x[0]);
        j(0, 0) = r < 0 ? 0.0 : om.intervals[static_cast<std::size_t>(r)].sign;
        return j;
    };
    sc.parm.alpha_dt = [](const Vec&, double) -> Vec { return {0.0}; };
    // alpha does not depend on the uncertainty-dependent component x2, so the
    // compensator is not needed
    sc.parm.D = lam;
    sc.parm.D1 = lam;  // refined below from the monotone-core grid

    sc.Gamma = Mat::diag({cfg.gamma});
    sc.theta_hat0 = {cfg.theta_hat0};
    sc.t0 = cfg.t0;
    sc.tf = cfg.tf;
    sc.h = cfg.h;

    // verification grid: the exactly-monotone core of Omega_M for theta in
    // [0.6, 1.4] (the published corner values are slightly loose there)
    sc.x_grid.clear();
    auto push_interval = [&](double lo, double hi, int pts) {
        for (int i = 0; i < pts; ++i) {
            const double x1 = lo + (hi - lo) * i / (pts - 1);
            for (double x2 : {-1.0, 0.0, 1.0}) sc.x_grid.push_back({x1, x2});
        }
    };
    push_interval(-1.12, 1.12, 41);
    push_interval(2.62, 3.36, 15);
    push_interval(-3.36, -2.62, 15);
    sc.theta_pairs = theta_pair_grid(sc.plant.theta_domain, 20, 400);
    sc.realizability_probes = {{0.5, 0.2}, {-0.9, 0.1}, {3.0, -0.4}};

    GrowthBounds gb = estimate_growth_bounds(sc.parm, sc.x_grid, sc.theta_pairs);
    sc.parm.D = gb.D_est;
    sc.parm.D1 = gb.D1_est;

    ClosedLoopSpec loop{sc.plant, sc.goal,       sc.target,       sc.parm,
                        sc.Gamma, sc.theta_hat0, cfg.eps.build(),
                        [om](const Vec& x, double) { return om.region(x[0]); }};
    const Vec x0 = {cfg.x10, cfg.x20};
    const double t0 = cfg.t0, tf = cfg.tf, h = cfg.h;
    sc.run = [loop, x0, t0, tf, h]() { return run_closed_loop(loop, x0, t0, tf, h); };
    return sc;
}

BuiltScenario build_linear(const LinearConfig& cfg) {
    BuiltScenario sc;
    sc.name = "linear";

    sc.plant.q = 0;
    sc.plant.p = 1;
    sc.plant.f2 = [](const Vec&, const Vec& th, double t) -> Vec {
        return {std::sin(t) * th[0] + std::cos(t) * th[1]};
    };
    sc.plant.g2 = [](const Vec&, double) -> Vec { return {1.0}; };
    sc.plant.theta_true = cfg.theta;
    sc.plant.theta_domain = {{-2.0, -2.0}, {2.0, 2.0}};

    sc.goal.psi = [](const Vec& x, double) { return x[0]; };
    sc.goal.grad_x = [](const Vec&, double) -> Vec { return {1.0}; };
    sc.goal.ddt = [](const Vec&, double) { return 0.0; };

    sc.target.omega = {cfg.omega};
    sc.target.phi = [](double psi, const Vec& omv, double) { return omv[0] * psi; };

    sc.parm.d = 2;
    sc.parm.f = [](const Vec&, const Vec& th, double t) {
        return std::sin(t) * th[0] + std::cos(t) * th[1];
    };
    sc.parm.alpha = [](const Vec&, double t) -> Vec { return {std::sin(t), std::cos(t)}; };
    sc.parm.alpha_jac_x = [](const Vec&, double) { return Mat(2, 1); };
    sc.parm.alpha_dt = [](const Vec&, double t) -> Vec { return {std::cos(t), -std::sin(t)}; };
    sc.parm.D = 1.0;
    sc.parm.D1 = 1.0;

    sc.Gamma = Mat::diag({cfg.gamma, cfg.gamma});
    sc.theta_hat0 = cfg.theta_hat0;
    sc.t0 = cfg.t0;
    sc.tf = cfg.tf;
    sc.h = cfg.h;
    sc.pe_window = 2.0 * std::acos(-1.0);

    sc.x_grid = grid_points(Box{{-1.0}, {1.0}}, 9);
    sc.theta_pairs = theta_pair_grid(sc.plant.theta_domain, 8, 400);
    sc.realizability_probes = {{0.0}, {0.5}, {-0.8}};

    ClosedLoopSpec loop{sc.plant, sc.goal,      sc.target,       sc.parm,
                        sc.Gamma, sc.theta_hat0, cfg.eps.build(), nullptr};
    const Vec x0 = {cfg.x0};
    const double t0 = cfg.t0, tf = cfg.tf, h = cfg.h;
    sc.run = [loop, x0, t0, tf, h]() { return run_closed_loop(loop, x0, t0, tf, h); };
    return sc;
}

BuiltScenario build_abs(const AbsConfig& cfg) {
    BuiltScenario sc;
    sc.name = "abs";
    const LugreParams p = cfg.p;
    const RoadProfile road = cfg.road;
    const double gamma = cfg.gamma;

    // augmented layout: [x1, x2, x3, xhat3, s, theta_I]
    sc.plant.q = 0;
    sc.plant.p = 6;
    // the estimator analysis for this scenario never evaluates the drift
    // (B = 0); the run uses its own loop below
    sc.plant.f2 = [](const Vec&, const Vec&, double) -> Vec { return Vec(6, 0.0); };
    sc.plant.g2 = [](const Vec&, double) -> Vec { return Vec(6, 0.0); };
    sc.plant.theta_true = {road.pieces.back().theta};
    sc.plant.theta_domain = {{0.3}, {1.5}};

    sc.goal.psi = [](const Vec& x, double) { return x[3] - x[2]; };
    sc.goal.grad_x = [](const Vec&, double) -> Vec { return {0.0, 0.0, -1.0, 1.0, 0.0, 0.0}; };
    sc.goal.ddt = [](const Vec&, double) { return 0.0; };

    sc.target.omega = {1.0};
    sc.target.phi = [](double psi, const Vec& omv, double) { return omv[0] * psi; };

    sc.parm.d = 1;
    sc.parm.f = [p](const Vec& x, const Vec& th, double) {
        const double bracket = (1.0 - x[2]) / p.m + p.r * p.r / p.J;
        return (bracket / x[0]) * lugre_friction(p, x[1], x[2], th[0]);
    };
    sc.parm.alpha = [](const Vec&, double) -> Vec { return {1.0}; };
    sc.parm.alpha_jac_x = [](const Vec&, double) { return Mat(1, 6); };
    sc.parm.alpha_dt = [](const Vec&, double) -> Vec { return {0.0}; };

    sc.Gamma = Mat::diag({gamma});
    sc.theta_hat0 = {cfg.theta_hat0};
    sc.t0 = cfg.t0;
    sc.tf = cfg.tf;
    sc.h = cfg.h;
    sc.substeps = std::max(1, static_cast<int>(std::ceil(cfg.h / 1e-4 - 1e-12)));
    sc.wheel = true;

    // growth constants over the operating envelope, recorded as scenario
    // constants for the mismatch bound and the Lyapunov channel
    {
        std::vector<Vec> xs;
        for (const Vec& pt : grid_points(Box{{5.5, 0.01}, {34.0, 0.25}}, 12)) {
            for (int i = 0; i < 8; ++i) {
                const double x2 = 18.0 + (115.0 - 18.0) * i / 7.0;
                xs.push_back({pt[0], x2, pt[1], 0.0, 0.0, 0.0});
            }
        }
        sc.x_grid = std::move(xs);
        sc.theta_pairs = theta_pair_grid(sc.plant.theta_domain, 20, 400);
        const GrowthBounds gb = estimate_growth_bounds(sc.parm, sc.x_grid, sc.theta_pairs);
        sc.parm.D = gb.D_est;
        sc.parm.D1 = gb.D1_est;
    }
    sc.realizability_probes = {{30.0, 95.0, 0.05, 0.05, 0.0, 0.0},
                               {12.0, 38.0, 0.12, 0.11, 20.0, 0.0}};

    const Disturbance dist = cfg.eps.build();
    const double x3_fixed = cfg.x3_star_fixed;
    const double theta_hat0 = cfg.theta_hat0;
    const double x10 = cfg.x10;
    const double delta1 = cfg.delta1;
    const double D = sc.parm.D, D1 = sc.parm.D1;
    const double t0 = cfg.t0, tf = cfg.tf, h = cfg.h;
    const int substeps = sc.substeps;

    sc.run = [=]() {
        Vec aug0 = {x10, x10 / p.r, 0.0, 0.0, 0.0, theta_hat0 / gamma, 0.0};
        auto x3_cache = std::make_shared<double>(
            x3_fixed > 0.0 ? x3_fixed : optimal_slip(p, std::max(theta_hat0, 0.05), aug0[1]));

        RhsFn rhs = [p, road, gamma, dist, x3_cache](const Vec& aug, double t, Vec& dx) {
            const SlipLoopEval e = slip_control_loop_step(p, aug, road, gamma, *x3_cache);
            const double fs_true = lugre_friction_guarded(p, aug[1], aug[2], e.theta_true);
            const Vec wheel = wheel_dynamics(p, {aug[0], aug[1], aug[2]}, fs_true, e.u);
            dx.resize(7);
            dx[0] = wheel[0];
            dx[1] = wheel[1];
            dx[2] = wheel[2];
            dx[3] = e.dxhat3 + dist.value(t);  // eps enters the measured psi' path
            dx[4] = aug[0];
            dx[5] = e.dtheta_I;
            dx[6] = e.mismatch * e.mismatch;  // resolved squared-mismatch integral
        };

        SimulateOptions opt;
        opt.substeps = substeps;
        opt.on_step_begin = [p, road, gamma, x3_cache, x3_fixed](const Vec& aug, double) {
            if (x3_fixed > 0.0) return;
            const double th_hat = gamma * ((aug[3] - aug[2]) + aug[5]);
            *x3_cache = optimal_slip(p, std::max(th_hat, 0.05), aug[1]);
        };

        auto gamma_chol = *cholesky(Mat::diag({gamma}));
        std::vector<Observer> obs;
        obs.push_back({"psi", 1, [](const Vec& a, double) -> Vec { return {a[3] - a[2]}; }});
        obs.push_back({"u", 1, [p, road, gamma, x3_cache](const Vec& a, double) -> Vec {
                           return {slip_control_loop_step(p, a, road, gamma, *x3_cache).u};
                       }});
        obs.push_back({"theta_hat", 1, [gamma](const Vec& a, double) -> Vec {
                           return {gamma * ((a[3] - a[2]) + a[5])};
                       }});
        obs.push_back({"V", 1, [p, road, gamma, gamma_chol, dist, D, D1](const Vec& a, double t) -> Vec {
                           const Vec th_hat = {gamma * ((a[3] - a[2]) + a[5])};
                           const Vec th_true = {road.theta_at(a[4])};
                           return {lyapunov_value(th_hat, th_true, gamma_chol, dist.tail(t), D, D1)};
                       }});
        obs.push_back({"eps", 1, [dist](const Vec&, double t) -> Vec { return {dist.value(t)}; }});
        obs.push_back({"mismatch", 1, [p, road, gamma, x3_cache](const Vec& a, double) -> Vec {
                           return {slip_control_loop_step(p, a, road, gamma, *x3_cache).mismatch};
                       }});
        obs.push_back({"alpha", 1, [](const Vec&, double) -> Vec { return {1.0}; }});
        obs.push_back({"theta_true", 1, [road](const Vec& a, double) -> Vec {
                           return {road.theta_at(a[4])};
                       }});
        obs.push_back({"x3_star", 1, [x3_cache](const Vec&, double) -> Vec { return {*x3_cache}; }});
        obs.push_back({"mismatch_l2sq", 1, [](const Vec& a, double) -> Vec { return {a[6]}; }});
        {
            auto prev = std::make_shared<int>(-2);
            obs.push_back({"event", 1, [road, prev](const Vec& a, double) -> Vec {
                               const int seg = road.segment_index(a[4]);
                               const bool changed = (*prev != -2) && (seg != *prev);
                               *prev = seg;
                               return {changed ? 1.0 : 0.0};
                           }});
        }

        return simulate(rhs, aug0, t0, tf, h, StopCondition::component_le(0, delta1), obs, opt);
    };
    return sc;
}

}  // namespace adaptsim
