#include "adaptsim/adapt_core.hpp"

#include <cassert>
#include <cmath>

namespace adaptsim {

namespace {

double fd_step(double xi) { return 1e-6 * std::max(1.0, std::fabs(xi)); }

Vec central_grad(const std::function<double(const Vec&, double)>& f, const Vec& x, double t) {
    Vec g(x.size());
    Vec xp = x, xm = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double h = fd_step(x[i]);
        xp[i] = x[i] + h;
        xm[i] = x[i] - h;
        g[i] = (f(xp, t) - f(xm, t)) / (2.0 * h);
        xp[i] = x[i];
        xm[i] = x[i];
    }
    return g;
}

double central_ddt(const std::function<double(const Vec&, double)>& f, const Vec& x, double t) {
    const double h = fd_step(t);
    return (f(x, t + h) - f(x, t - h)) / (2.0 * h);
}

Mat central_jac(const std::function<Vec(const Vec&, double)>& f, const Vec& x, double t, int rows) {
    Mat j(rows, static_cast<int>(x.size()));
    Vec xp = x, xm = x;
    for (std::size_t c = 0; c < x.size(); ++c) {
        const double h = fd_step(x[c]);
        xp[c] = x[c] + h;
        xm[c] = x[c] - h;
        const Vec fp = f(xp, t);
        const Vec fm = f(xm, t);
        for (int r = 0; r < rows; ++r) j(r, static_cast<int>(c)) = (fp[r] - fm[r]) / (2.0 * h);
        xp[c] = x[c];
        xm[c] = x[c];
    }
    return j;
}

Vec central_vec_ddt(const std::function<Vec(const Vec&, double)>& f, const Vec& x, double t, int rows) {
    const double h = fd_step(t);
    const Vec fp = f(x, t + h);
    const Vec fm = f(x, t - h);
    Vec r(rows);
    for (int i = 0; i < rows; ++i) r[i] = (fp[i] - fm[i]) / (2.0 * h);
    return r;
}

}  // namespace

bool Box::contains(const Vec& v) const {
    if (v.size() != lo.size()) return false;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] < lo[i] || v[i] > hi[i]) return false;
    return true;
}

Vec Plant::drift(const Vec& x, const Vec& theta, double t) const {
    Vec out;
    out.reserve(static_cast<std::size_t>(n()));
    if (q > 0) {
        const Vec a = f1(x, t);
        out.insert(out.end(), a.begin(), a.end());
    }
    const Vec b = f2(x, theta, t);
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

Vec Plant::input_field(const Vec& x, double t) const {
    Vec out;
    out.reserve(static_cast<std::size_t>(n()));
    if (q > 0) {
        const Vec a = g1(x, t);
        out.insert(out.end(), a.begin(), a.end());
    }
    const Vec b = g2(x, t);
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

Vec GoalFunction::gradient(const Vec& x, double t) const {
    if (grad_x) return grad_x(x, t);
    return central_grad(psi, x, t);
}

double GoalFunction::time_derivative(const Vec& x, double t) const {
    if (ddt) return ddt(x, t);
    return central_ddt(psi, x, t);
}

double GoalFunction::gradient_fd_error(const Vec& x, double t) const {
    if (!grad_x) return 0.0;
    const Vec ga = grad_x(x, t);
    const Vec gn = central_grad(psi, x, t);
    double rel = 0.0;
    for (std::size_t i = 0; i < ga.size(); ++i) {
        const double scale = std::max({1.0, std::fabs(ga[i]), std::fabs(gn[i])});
        rel = std::max(rel, std::fabs(ga[i] - gn[i]) / scale);
    }
    return rel;
}

Vec Parametrization::psi_comp(const Vec& x, double t) const {
    if (Psi) return Psi(x, t);
    return Vec(static_cast<std::size_t>(d), 0.0);
}

Mat Parametrization::b_matrix(const Vec& x, double t, int p) const {
    if (Bmat) return Bmat(x, t);
    return Mat(d, p);
}

Mat Parametrization::alpha_jacobian(const Vec& x, double t) const {
    if (alpha_jac_x) return alpha_jac_x(x, t);
    return central_jac(alpha, x, t, d);
}

Vec Parametrization::alpha_time_derivative(const Vec& x, double t) const {
    if (alpha_dt) return alpha_dt(x, t);
    return central_vec_ddt(alpha, x, t, d);
}

Mat Parametrization::psi_comp_jacobian(const Vec& x, double t) const {
    if (!Psi) return Mat(d, static_cast<int>(x.size()));
    if (Psi_jac_x) return Psi_jac_x(x, t);
    return central_jac(Psi, x, t, d);
}

Vec Parametrization::psi_comp_time_derivative(const Vec& x, double t) const {
    if (!Psi) return Vec(static_cast<std::size_t>(d), 0.0);
    if (Psi_dt) return Psi_dt(x, t);
    return central_vec_ddt(Psi, x, t, d);
}

EstimatorState make_estimator(Vec theta_I, Mat Gamma) {
    if (!all_finite(theta_I)) throw Error("estimator: theta_I must be finite");
    auto chol = cholesky(Gamma);
    if (!chol) throw Error("estimator: Gamma must be symmetric positive definite");
    return EstimatorState{std::move(theta_I), std::move(Gamma), std::move(*chol)};
}

Disturbance Disturbance::decaying_exponential(double a, double b) {
    Disturbance d;
    d.eps = [a, b](double t) { return a * std::exp(-b * t); };
    // ||a e^{-b tau}||_{2,[t,inf]} = |a| e^{-b t} / sqrt(2 b)
    d.l2_tail = [a, b](double t) { return std::fabs(a) * std::exp(-b * t) / std::sqrt(2.0 * b); };
    return d;
}

double control_input_at(const Plant& plant, const GoalFunction& goal, const TargetDynamics& target,
                        const Vec& theta_hat, double psi_value, const Vec& x, double t,
                        double singular_tol) {
    const Vec grad = goal.gradient(x, t);
    const double lg = dot(grad, plant.input_field(x, t));
    if (std::fabs(lg) < singular_tol)
        throw SingularControl("control: |L_g psi| below tolerance at t=" + std::to_string(t));
    const double lf = dot(grad, plant.drift(x, theta_hat, t));
    const double dpsi_dt = goal.time_derivative(x, t);
    return (-lf - target(psi_value, t) - dpsi_dt) / lg;
}

double control_input(const Plant& plant, const GoalFunction& goal, const TargetDynamics& target,
                     const Vec& theta_hat, const Vec& x, double t, double singular_tol) {
    return control_input_at(plant, goal, target, theta_hat, goal.psi(x, t), x, t, singular_tol);
}

Vec theta_hat_at(const Parametrization& parm, const EstimatorState& est, double psi_value,
                 const Vec& x, double t) {
    Vec inner = psi_value * parm.alpha(x, t) - parm.psi_comp(x, t);
    for (std::size_t i = 0; i < inner.size(); ++i) inner[i] += est.theta_I[i];
    return est.Gamma * inner;
}

Vec theta_hat_estimate(const GoalFunction& goal, const Parametrization& parm,
                       const EstimatorState& est, const Vec& x, double t) {
    return theta_hat_at(parm, est, goal.psi(x, t), x, t);
}

Vec r_correction_at(const Plant& plant, const Parametrization& parm, const Vec& theta_hat,
                    double psi_value, double u, const Vec& x, double t) {
    const int d = parm.d;
    Vec r = parm.psi_comp_time_derivative(x, t) - psi_value * parm.alpha_time_derivative(x, t);

    if (plant.q > 0) {
        const Mat ja = parm.alpha_jacobian(x, t);
        const Mat jp = parm.psi_comp_jacobian(x, t);
        const Vec f1 = plant.f1(x, t);
        const Vec g1 = plant.g1(x, t);
        for (int i = 0; i < d; ++i) {
            double lf1_a = 0.0, lf1_p = 0.0, lg1_a = 0.0, lg1_p = 0.0;
            for (int j = 0; j < plant.q; ++j) {
                lf1_a += ja(i, j) * f1[j];
                lf1_p += jp(i, j) * f1[j];
                lg1_a += ja(i, j) * g1[j];
                lg1_p += jp(i, j) * g1[j];
            }
            r[i] -= (psi_value * lf1_a - lf1_p) + (psi_value * lg1_a - lg1_p) * u;
        }
    }

    if (parm.Bmat) {
        const Mat b = parm.Bmat(x, t);
        Vec x2dot = plant.f2(x, theta_hat, t);
        axpy(u, plant.g2(x, t), x2dot);
        const Vec bterm = b * x2dot;
        for (int i = 0; i < d; ++i) r[i] += bterm[i];
    }
    return r;
}

Vec r_correction(const Plant& plant, const GoalFunction& goal, const Parametrization& parm,
                 const Vec& theta_hat, double u, const Vec& x, double t) {
    return r_correction_at(plant, parm, theta_hat, goal.psi(x, t), u, x, t);
}

Vec estimator_rhs_at(const Plant& plant, const TargetDynamics& target, const Parametrization& parm,
                     const Vec& theta_hat, double psi_value, const Vec& x, double u, double t) {
    Vec rhs = target(psi_value, t) * parm.alpha(x, t);
    const Vec r = r_correction_at(plant, parm, theta_hat, psi_value, u, x, t);
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += r[i];
    return rhs;
}

Vec estimator_rhs(const GoalFunction& goal, const TargetDynamics& target, const Parametrization& parm,
                  const Plant& plant, const EstimatorState& est, const Vec& x, double u, double t) {
    const double psi_value = goal.psi(x, t);
    const Vec th = theta_hat_at(parm, est, psi_value, x, t);
    return estimator_rhs_at(plant, target, parm, th, psi_value, x, u, t);
}

double lyapunov_value(const Vec& theta_hat, const Vec& theta_true, const Mat& gamma_chol,
                      double eps_l2_tail, double D, double D1) {
    const Vec diff = theta_hat - theta_true;
    return 0.5 * quad_form_inv(gamma_chol, diff) +
           (D / (4.0 * D1 * D1)) * eps_l2_tail * eps_l2_tail;
}

double mismatch_l2_bound(const Vec& theta_hat0, const Vec& theta_true, const Mat& gamma_chol,
                         double D, double eps_l2, double D1) {
    const Vec diff = theta_true - theta_hat0;
    return std::sqrt(0.5 * D * quad_form_inv(gamma_chol, diff)) + (D / D1) * eps_l2;
}

EquivalenceReport virtual_equivalence_check(const Trace& trace, const Parametrization& parm,
                                            const Plant& plant, const TargetDynamics& target,
                                            const Mat& Gamma, double settle_window) {
    const std::size_t n = trace.size();
    if (n < 3) throw TraceTooShort("virtual_equivalence_check: need at least 3 samples");
    const auto& psi_ch = trace.channel("psi");
    const auto& th_ch = trace.channel("theta_hat");
    const int ev_idx = trace.channel_index("event");
    const int tt_idx = trace.channel_index("theta_true");
    const int nx = plant.n();

    std::vector<double> event_times;
    if (ev_idx >= 0 && settle_window > 0.0) {
        const auto& ev = trace.channels[static_cast<std::size_t>(ev_idx)];
        for (std::size_t j = 0; j < n; ++j)
            if (ev[j][0] != 0.0) event_times.push_back(trace.times[j]);
    }

    EquivalenceReport rep;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (ev_idx >= 0) {
            bool masked = false;
            for (std::size_t j = i - 1; j <= i + 1; ++j)
                if (trace.channels[static_cast<std::size_t>(ev_idx)][j][0] != 0.0) masked = true;
            if (masked) {
                ++rep.samples_skipped;
                continue;
            }
        }
        if (settle_window > 0.0) {
            const double t_i = trace.times[i];
            bool masked = t_i - trace.times.front() < settle_window;
            for (const double te : event_times)
                if (t_i - te > -trace.step() && t_i - te < settle_window) masked = true;
            if (masked) {
                ++rep.samples_skipped;
                continue;
            }
        }
        const double h2 = trace.times[i + 1] - trace.times[i - 1];
        Vec dth(th_ch[i].size());
        for (std::size_t k = 0; k < dth.size(); ++k)
            dth[k] = (th_ch[i + 1][k] - th_ch[i - 1][k]) / h2;
        const double dpsi = (psi_ch[i + 1][0] - psi_ch[i - 1][0]) / h2;

        const Vec x(trace.states[i].begin(), trace.states[i].begin() + nx);
        const double t = trace.times[i];
        Vec inner = (dpsi + target(psi_ch[i][0], t)) * parm.alpha(x, t);
        if (parm.Bmat) {
            const Vec theta = tt_idx >= 0 ? trace.channels[static_cast<std::size_t>(tt_idx)][i]
                                          : plant.theta_true;
            const Vec df2 = plant.f2(x, theta, t) - plant.f2(x, th_ch[i], t);
            const Vec bterm = parm.Bmat(x, t) * df2;
            for (std::size_t k = 0; k < inner.size(); ++k) inner[k] -= bterm[k];
        }
        const Vec rhs = Gamma * inner;
        rep.max_residual = std::max(rep.max_residual, inf_norm(dth - rhs));
        ++rep.samples_checked;
    }
    return rep;
}

}  // namespace adaptsim
