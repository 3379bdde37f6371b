#include "adaptsim/closed_loop.hpp"

#include <memory>

namespace adaptsim {

namespace {

struct LoopEval {
    Vec x;
    double psi;
    Vec theta_hat;
    double u;
};

LoopEval eval_loop(const ClosedLoopSpec& spec, const EstimatorState& est, const Vec& aug, double t) {
    const int n = spec.plant.n();
    const int d = spec.parm.d;
    LoopEval e;
    e.x.assign(aug.begin(), aug.begin() + n);
    e.psi = aug[static_cast<std::size_t>(n)];
    EstimatorState local = est;
    local.theta_I.assign(aug.begin() + n + 1, aug.begin() + n + 1 + d);
    e.theta_hat = theta_hat_at(spec.parm, local, e.psi, e.x, t);
    e.u = control_input_at(spec.plant, spec.goal, spec.target, e.theta_hat, e.psi, e.x, t,
                           spec.singular_tol);
    return e;
}

}  // namespace

RhsFn closed_loop_rhs(const ClosedLoopSpec& spec) {
    auto est = std::make_shared<EstimatorState>(
        make_estimator(Vec(static_cast<std::size_t>(spec.parm.d), 0.0), spec.Gamma));
    return [spec, est](const Vec& aug, double t, Vec& dx) {
        const int n = spec.plant.n();
        const int d = spec.parm.d;
        const LoopEval e = eval_loop(spec, *est, aug, t);

        Vec xdot = spec.plant.drift(e.x, spec.plant.theta_true, t);
        axpy(e.u, spec.plant.input_field(e.x, t), xdot);

        // eps(t) is realized as the minimal unmodeled state perturbation with
        // L_d psi = eps, so the measured goal derivative picks up exactly
        // +eps while the estimator identities stay exact
        const Vec grad = spec.goal.gradient(e.x, t);
        const double eps = spec.dist.value(t);
        if (eps != 0.0) axpy(eps / dot(grad, grad), grad, xdot);
        const double psidot = dot(grad, xdot) + spec.goal.time_derivative(e.x, t);

        const Vec thI_dot =
            estimator_rhs_at(spec.plant, spec.target, spec.parm, e.theta_hat, e.psi, e.x, e.u, t);

        // trailing state: running integral of the squared mismatch, so the
        // functional norm is resolved at substep resolution
        const double mismatch =
            spec.parm.f(e.x, spec.plant.theta_true, t) - spec.parm.f(e.x, e.theta_hat, t);

        dx.resize(aug.size());
        for (int i = 0; i < n; ++i) dx[static_cast<std::size_t>(i)] = xdot[static_cast<std::size_t>(i)];
        dx[static_cast<std::size_t>(n)] = psidot;
        for (int i = 0; i < d; ++i) dx[static_cast<std::size_t>(n + 1 + i)] = thI_dot[static_cast<std::size_t>(i)];
        dx[static_cast<std::size_t>(n + 1 + d)] = mismatch * mismatch;
    };
}

Vec closed_loop_initial(const ClosedLoopSpec& spec, const Vec& x0, double t0) {
    const int d = spec.parm.d;
    const EstimatorState est = make_estimator(Vec(static_cast<std::size_t>(d), 0.0), spec.Gamma);
    const double psi0 = spec.goal.psi(x0, t0);

    // theta_I(t0) = Gamma^{-1} theta_hat0 - theta_P(x0, t0), so the configured
    // initial estimate is met exactly.
    Vec thI = chol_solve(est.Gamma_chol, spec.theta_hat0);
    const Vec theta_p = psi0 * spec.parm.alpha(x0, t0) - spec.parm.psi_comp(x0, t0);
    for (int i = 0; i < d; ++i) thI[static_cast<std::size_t>(i)] -= theta_p[static_cast<std::size_t>(i)];

    Vec aug = x0;
    aug.push_back(psi0);
    aug.insert(aug.end(), thI.begin(), thI.end());
    aug.push_back(0.0);  // running integral of the squared mismatch
    return aug;
}

std::vector<Observer> closed_loop_observers(const ClosedLoopSpec& spec) {
    const int n = spec.plant.n();
    const int d = spec.parm.d;
    auto est = std::make_shared<EstimatorState>(
        make_estimator(Vec(static_cast<std::size_t>(d), 0.0), spec.Gamma));

    std::vector<Observer> obs;
    obs.push_back({"psi", 1, [n](const Vec& aug, double) -> Vec {
                       return {aug[static_cast<std::size_t>(n)]};
                   }});
    obs.push_back({"u", 1, [spec, est](const Vec& aug, double t) -> Vec {
                       return {eval_loop(spec, *est, aug, t).u};
                   }});
    obs.push_back({"theta_hat", d, [spec, est](const Vec& aug, double t) -> Vec {
                       return eval_loop(spec, *est, aug, t).theta_hat;
                   }});
    obs.push_back({"V", 1, [spec, est](const Vec& aug, double t) -> Vec {
                       const LoopEval e = eval_loop(spec, *est, aug, t);
                       return {lyapunov_value(e.theta_hat, spec.plant.theta_true, est->Gamma_chol,
                                              spec.dist.tail(t), spec.parm.D, spec.parm.D1)};
                   }});
    obs.push_back({"eps", 1, [spec](const Vec&, double t) -> Vec {
                       return {spec.dist.value(t)};
                   }});
    obs.push_back({"mismatch", 1, [spec, est](const Vec& aug, double t) -> Vec {
                       const LoopEval e = eval_loop(spec, *est, aug, t);
                       return {spec.parm.f(e.x, spec.plant.theta_true, t) -
                               spec.parm.f(e.x, e.theta_hat, t)};
                   }});
    obs.push_back({"alpha", d, [spec, n](const Vec& aug, double t) -> Vec {
                       const Vec x(aug.begin(), aug.begin() + n);
                       return spec.parm.alpha(x, t);
                   }});
    obs.push_back({"theta_true", d, [spec](const Vec&, double) -> Vec {
                       return spec.plant.theta_true;
                   }});
    obs.push_back({"mismatch_l2sq", 1, [n, d](const Vec& aug, double) -> Vec {
                       return {aug[static_cast<std::size_t>(n + 1 + d)]};
                   }});
    if (spec.region) {
        auto prev = std::make_shared<int>(-2);
        obs.push_back({"event", 1, [spec, n, prev](const Vec& aug, double t) -> Vec {
                           const Vec x(aug.begin(), aug.begin() + n);
                           const int r = spec.region(x, t);
                           const bool changed = (*prev != -2) && (r != *prev);
                           *prev = r;
                           return {changed ? 1.0 : 0.0};
                       }});
    }
    return obs;
}

Trace run_closed_loop(const ClosedLoopSpec& spec, const Vec& x0, double t0, double tf, double h,
                      const StopCondition& stop, const SimulateOptions& opt) {
    return simulate(closed_loop_rhs(spec), closed_loop_initial(spec, x0, t0), t0, tf, h, stop,
                    closed_loop_observers(spec), opt);
}

}  // namespace adaptsim
