#include "adaptsim/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "adaptsim/parallel.hpp"
#include "adaptsim/report.hpp"

namespace adaptsim {

namespace {

bool event_near(const Trace& trace, int ev_idx, std::size_t k) {
    if (ev_idx < 0) return false;
    const auto& ev = trace.channels[static_cast<std::size_t>(ev_idx)];
    return ev[k][0] != 0.0;
}

}  // namespace

double parameter_norm_max_increase(const Trace& trace, const Mat& gamma_chol) {
    const auto& th = trace.channel("theta_hat");
    const auto& tt = trace.channel("theta_true");
    const int ev = trace.channel_index("event");
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < trace.size(); ++k) {
        if (event_near(trace, ev, k) || event_near(trace, ev, k + 1)) continue;
        const double a = quad_form_inv(gamma_chol, th[k] - tt[k]);
        const double b = quad_form_inv(gamma_chol, th[k + 1] - tt[k + 1]);
        worst = std::max(worst, b - a);
    }
    return worst;
}

double p1_worst_slack(const Trace& trace, const Mat& gamma_chol, double D, double D1) {
    const auto& eps = trace.channel("eps");
    const auto& th = trace.channel("theta_hat");
    const auto& tt = trace.channel("theta_true");
    const int ev = trace.channel_index("event");
    // squared mismatch integrated alongside the loop (resolves transients
    // narrower than the recording grid); trapezoid of the recorded channel
    // is the fallback for externally built traces
    const int m2_idx = trace.channel_index("mismatch_l2sq");
    const auto& mis = trace.channel("mismatch");

    double slack = std::numeric_limits<double>::infinity();
    double mis2 = 0.0, eps2 = 0.0;
    double m2_anchor = 0.0;
    double anchor_term = 0.5 * D * quad_form_inv(gamma_chol, tt[0] - th[0]);
    for (std::size_t k = 1; k < trace.size(); ++k) {
        if (event_near(trace, ev, k)) {
            mis2 = eps2 = 0.0;
            if (m2_idx >= 0) m2_anchor = trace.channels[static_cast<std::size_t>(m2_idx)][k][0];
            anchor_term = 0.5 * D * quad_form_inv(gamma_chol, tt[k] - th[k]);
            continue;
        }
        const double dt = trace.times[k] - trace.times[k - 1];
        if (m2_idx >= 0) {
            mis2 = trace.channels[static_cast<std::size_t>(m2_idx)][k][0] - m2_anchor;
        } else {
            mis2 += 0.5 * dt * (mis[k - 1][0] * mis[k - 1][0] + mis[k][0] * mis[k][0]);
        }
        eps2 += 0.5 * dt * (eps[k - 1][0] * eps[k - 1][0] + eps[k][0] * eps[k][0]);
        const double bound = std::sqrt(anchor_term) + (D / D1) * std::sqrt(eps2);
        slack = std::min(slack, bound - std::sqrt(std::max(0.0, mis2)));
    }
    return slack;
}

BuiltScenario scenario_from_config(const Config& cfg) {
    cfg.validate(config_schema());
    const std::string name = cfg.get_string("scenario.name", "");
    if (name.empty()) throw ConfigError("missing required key 'scenario.name'");

    if (name == "spring") {
        SpringConfig c;
        c.k0 = cfg.get_double("spring.k0", c.k0);
        c.lambda = cfg.get_double("spring.lambda", c.lambda);
        c.theta = cfg.get_double("plant.theta", c.theta);
        c.theta_hat0 = cfg.get_double("estimator.theta_hat0", c.theta_hat0);
        c.gamma = cfg.get_double("estimator.gamma", c.gamma);
        c.omega = cfg.get_double("target.omega", c.omega);
        c.x10 = cfg.get_double("spring.x10", c.x10);
        c.x20 = cfg.get_double("spring.x20", c.x20);
        c.tf = cfg.get_double("run.tf", c.tf);
        c.h = cfg.get_double("run.h", c.h);
        c.eps.kind = cfg.get_string("disturbance.kind", c.eps.kind);
        c.eps.a = cfg.get_double("disturbance.a", c.eps.a);
        c.eps.b = cfg.get_double("disturbance.b", c.eps.b);
        return build_spring(c);
    }
    if (name == "sine") {
        SineConfig c;
        c.lambda = cfg.get_double("sine.lambda", c.lambda);
        c.theta = cfg.get_double("plant.theta", c.theta);
        c.theta_hat0 = cfg.get_double("estimator.theta_hat0", c.theta_hat0);
        c.gamma = cfg.get_double("estimator.gamma", c.gamma);
        c.omega = cfg.get_double("target.omega", c.omega);
        c.x10 = cfg.get_double("sine.x10", c.x10);
        c.x20 = cfg.get_double("sine.x20", c.x20);
        c.tf = cfg.get_double("run.tf", c.tf);
        c.h = cfg.get_double("run.h", c.h);
        c.eps.kind = cfg.get_string("disturbance.kind", c.eps.kind);
        c.eps.a = cfg.get_double("disturbance.a", c.eps.a);
        c.eps.b = cfg.get_double("disturbance.b", c.eps.b);
        return build_sine(c);
    }
    if (name == "abs") {
        AbsConfig c;
        c.x10 = cfg.get_double("abs.x10", c.x10);
        c.x3_star_fixed = cfg.get_double("abs.x3_star", c.x3_star_fixed);
        c.p.Ks = cfg.get_double("abs.ks", c.p.Ks);
        c.p.Fn = cfg.get_double("abs.fn", c.p.Fn);
        c.delta1 = cfg.get_double("abs.delta1", c.delta1);
        c.gamma = cfg.get_double("estimator.gamma", c.gamma);
        c.theta_hat0 = cfg.get_double("estimator.theta_hat0", c.theta_hat0);
        c.tf = cfg.get_double("run.tf", c.tf);
        c.h = cfg.get_double("run.h", c.h);
        c.eps.kind = cfg.get_string("disturbance.kind", c.eps.kind);
        c.eps.a = cfg.get_double("disturbance.a", c.eps.a);
        c.eps.b = cfg.get_double("disturbance.b", c.eps.b);
        return build_abs(c);
    }
    if (name == "linear") {
        LinearConfig c;
        c.theta = {cfg.get_double("plant.theta0", c.theta[0]),
                   cfg.get_double("plant.theta1", c.theta[1])};
        c.theta_hat0 = {cfg.get_double("estimator.theta_hat0_0", c.theta_hat0[0]),
                        cfg.get_double("estimator.theta_hat0_1", c.theta_hat0[1])};
        c.gamma = cfg.get_double("estimator.gamma", c.gamma);
        c.omega = cfg.get_double("target.omega", c.omega);
        c.x0 = cfg.get_double("linear.x0", c.x0);
        c.tf = cfg.get_double("run.tf", c.tf);
        c.h = cfg.get_double("run.h", c.h);
        c.eps.kind = cfg.get_string("disturbance.kind", c.eps.kind);
        c.eps.a = cfg.get_double("disturbance.a", c.eps.a);
        c.eps.b = cfg.get_double("disturbance.b", c.eps.b);
        return build_linear(c);
    }
    throw ConfigError("unknown scenario '" + name + "' (expected spring|sine|abs|linear)");
}

PreflightResult run_preflight(const BuiltScenario& sc) {
    PreflightResult pre;
    for (const Vec& x : sc.realizability_probes)
        pre.goal_gradient_err = std::max(pre.goal_gradient_err, sc.goal.gradient_fd_error(x, sc.t0));
    pre.monotonicity = check_monotonicity(sc.parm, sc.x_grid, sc.theta_pairs, sc.t0);
    pre.growth = estimate_growth_bounds(sc.parm, sc.x_grid, sc.theta_pairs, sc.t0);
    for (const Vec& x : sc.realizability_probes) {
        const Mat res = realizability_residual(sc.parm, sc.goal, sc.plant.q, x, sc.t0);
        pre.realizability_max = std::max(pre.realizability_max, res.max_abs());
    }
    pre.passed = pre.monotonicity.violations == 0 && pre.growth.D1_est > 0.0 &&
                 pre.realizability_max <= 1e-4 && pre.goal_gradient_err <= 1e-4;
    return pre;
}

RunResult run_scenario(const Config& cfg, const std::string& out_dir) {
    BuiltScenario sc = scenario_from_config(cfg);

    RunResult result;
    result.scenario = sc.name;
    result.preflight = run_preflight(sc);
    if (!result.preflight.passed)
        throw PreflightFailed("scenario '" + sc.name + "' failed assumption preflight");

    result.trace = sc.run();
    const auto& th = result.trace.channel("theta_hat");
    const auto& tt = result.trace.channel("theta_true");
    const auto& psi = result.trace.channel("psi");
    result.terminal_theta_err = nrm2(th.back() - tt.back());
    result.terminal_psi = psi.back()[0];

    const Mat gamma_chol = *cholesky(sc.Gamma);
    result.ledger_max_increase = parameter_norm_max_increase(result.trace, gamma_chol);
    result.p1_worst_slack = p1_worst_slack(result.trace, gamma_chol, sc.parm.D, sc.parm.D1);
    if (sc.wheel && result.trace.stopped) result.braking = braking_distance(result.trace);

    const double pe_window = cfg.get_double("pe.window", sc.pe_window);
    if (pe_window > 0.0) {
        result.pe = measure_pe(result.trace, "alpha", pe_window);
        if (cfg.has("pe.delta")) {
            const double delta = cfg.get_double("pe.delta", 0.0);
            result.pe_delta = delta;
            result.pe_verdict_result =
                PeVerdict{result.pe->full_windows > 0 && result.pe->delta_inf >= delta,
                          result.pe->delta_inf};
        }
        if (result.pe->full_windows > 0) {
            // sup of ||alpha|| over the trace with a 5% safety inflation
            const double alpha_inf = 1.05 * result.pe->alpha_sup;
            result.certificate = convergence_rate(result.pe->delta_inf, pe_window, sc.parm.D,
                                                  sc.parm.D1, sc.Gamma, alpha_inf);
        }
    }

    result.layout.q = sc.plant.q;
    result.layout.n = sc.name == "abs" ? 3 : sc.plant.n();

    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        export_csv(result.trace, out_dir + "/trace.csv", result.layout,
                   result.pe ? &result.pe->per_sample : nullptr);
        write_text_file(out_dir + "/summary.txt", render_summary(result, cfg));
    }
    return result;
}

SweepResult sweep(const Config& base, const std::string& axis, const std::vector<double>& values) {
    {
        // axis must name a config field
        Config probe = base;
        probe.set(axis, "0");
        probe.validate(config_schema());
    }
    SweepResult out;
    out.axis = axis;

    const std::string name = base.get_string("scenario.name", "");
    out.metric_name = (name == "abs") ? "braking_distance_m" : "terminal_theta_err";

    out.rows.resize(values.size());
    parallel_for(static_cast<std::int64_t>(values.size()), Exec::parallel, [&](std::int64_t i) {
        SweepRow& row = out.rows[static_cast<std::size_t>(i)];
        row.value = values[static_cast<std::size_t>(i)];
        try {
            Config cfg = base;
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", row.value);
            cfg.set(axis, buf);
            const RunResult r = run_scenario(cfg, "");
            row.metric = r.braking ? *r.braking : r.terminal_theta_err;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    });
    return out;
}

SweepResult sweep_preset_abs_fixed_slip(const Config& base) {
    Config cfg = base;
    cfg.set("scenario.name", "abs");
    std::vector<double> values;
    for (int i = 0; i <= 5; ++i) values.push_back(0.10 + 0.02 * i);
    return sweep(cfg, "abs.x3_star", values);
}

}  // namespace adaptsim
