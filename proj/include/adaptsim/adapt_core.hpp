#pragma once

#include <functional>
#include <optional>

#include "adaptsim/integrate.hpp"
#include "adaptsim/linalg.hpp"

namespace adaptsim {

struct Box {
    Vec lo, hi;
    int dim() const { return static_cast<int>(lo.size()); }
    bool contains(const Vec& v) const;
};

/// Controlled plant, partitioned into uncertainty-independent (x1, dim q)
/// and uncertainty-dependent (x2, dim p) blocks:
///   x1' = f1(x,t) + g1(x,t) u
///   x2' = f2(x,theta,t) + g2(x,t) u
/// f1/g1 may be null when q == 0.
struct Plant {
    int q = 0;
    int p = 1;
    std::function<Vec(const Vec& x, double t)> f1, g1;
    std::function<Vec(const Vec& x, const Vec& theta, double t)> f2;
    std::function<Vec(const Vec& x, double t)> g2;
    Vec theta_true;
    Box theta_domain;

    int n() const { return q + p; }
    int d() const { return static_cast<int>(theta_true.size()); }
    /// Full drift f1 (+) f2 at the given parameter vector.
    Vec drift(const Vec& x, const Vec& theta, double t) const;
    /// Full input field g1 (+) g2.
    Vec input_field(const Vec& x, double t) const;
};

/// Goal function psi with optional analytic derivatives; central finite
/// differences (step 1e-6*max(1,|x_i|)) fill in anything not supplied.
struct GoalFunction {
    std::function<double(const Vec& x, double t)> psi;
    std::function<Vec(const Vec& x, double t)> grad_x;   // optional
    std::function<double(const Vec& x, double t)> ddt;   // optional

    Vec gradient(const Vec& x, double t) const;
    double time_derivative(const Vec& x, double t) const;
    /// Relative consistency of a supplied analytic gradient against central
    /// differences at a probe point; 0 when nothing is supplied.
    double gradient_fd_error(const Vec& x, double t) const;
};

struct TargetDynamics {
    std::function<double(double psi, const Vec& omega, double t)> phi;
    Vec omega;

    double operator()(double psi, double t) const { return phi(psi, omega, t); }
};

/// Monotone parametrization of the uncertainty f(x,theta,t) = L_{f(x,theta)} psi
/// along alpha(x,t)' theta, with compensator Psi and matrix B, and two-sided
/// growth constants D >= D1 > 0.
struct Parametrization {
    int d = 1;
    std::function<double(const Vec& x, const Vec& theta, double t)> f;
    std::function<Vec(const Vec& x, double t)> alpha;
    std::function<Vec(const Vec& x, double t)> Psi;   // null -> 0
    std::function<Mat(const Vec& x, double t)> Bmat;  // null -> 0 (d x p)

    // optional analytic derivatives (finite differences otherwise)
    std::function<Mat(const Vec& x, double t)> alpha_jac_x;  // d x n
    std::function<Vec(const Vec& x, double t)> alpha_dt;
    std::function<Mat(const Vec& x, double t)> Psi_jac_x;    // d x n
    std::function<Vec(const Vec& x, double t)> Psi_dt;

    double D = 1.0;
    double D1 = 1.0;

    Vec psi_comp(const Vec& x, double t) const;          // 0 when Psi null
    Mat b_matrix(const Vec& x, double t, int p) const;   // 0 when Bmat null
    Mat alpha_jacobian(const Vec& x, double t) const;
    Vec alpha_time_derivative(const Vec& x, double t) const;
    Mat psi_comp_jacobian(const Vec& x, double t) const;
    Vec psi_comp_time_derivative(const Vec& x, double t) const;
};

/// Integral state and gain of the finite-form estimator
/// theta_hat = Gamma (theta_P + theta_I). Gamma is validated SPD on
/// construction via its Cholesky factorization.
struct EstimatorState {
    Vec theta_I;
    Mat Gamma;
    Mat Gamma_chol;  // lower factor, cached
};

EstimatorState make_estimator(Vec theta_I, Mat Gamma);

struct Disturbance {
    std::function<double(double t)> eps;      // null -> 0
    std::function<double(double t)> l2_tail;  // ||eps||_{2,[t,inf]}; null -> 0

    double value(double t) const { return eps ? eps(t) : 0.0; }
    double tail(double t) const { return l2_tail ? l2_tail(t) : 0.0; }
    static Disturbance zero() { return {}; }
    /// a*exp(-b t): the built-in family with a closed-form L2 tail.
    static Disturbance decaying_exponential(double a, double b);
};

constexpr double kSingularTol = 1e-9;

/// Certainty-equivalence control evaluated with an explicit goal value
/// (the closed loop feeds the measured psi channel here):
///   u = (L_g psi)^{-1} (-L_{f(x,theta_hat)} psi - phi(psi_value) - dpsi/dt)
double control_input_at(const Plant& plant, const GoalFunction& goal, const TargetDynamics& target,
                        const Vec& theta_hat, double psi_value, const Vec& x, double t,
                        double singular_tol = kSingularTol);

/// Same with psi evaluated from the state.
double control_input(const Plant& plant, const GoalFunction& goal, const TargetDynamics& target,
                     const Vec& theta_hat, const Vec& x, double t,
                     double singular_tol = kSingularTol);

/// theta_P = psi*alpha - Psi; returns Gamma (theta_P + theta_I).
Vec theta_hat_at(const Parametrization& parm, const EstimatorState& est, double psi_value,
                 const Vec& x, double t);
Vec theta_hat_estimate(const GoalFunction& goal, const Parametrization& parm,
                       const EstimatorState& est, const Vec& x, double t);

/// Correction shaping d(theta_hat)/dt to the virtual algorithm:
///   R = dPsi/dt - psi dalpha/dt - (psi L_{f1}alpha - L_{f1}Psi)
///       - (psi L_{g1}alpha - L_{g1}Psi) u + B (f2(x,theta_hat) + g2 u)
Vec r_correction_at(const Plant& plant, const Parametrization& parm, const Vec& theta_hat,
                    double psi_value, double u, const Vec& x, double t);
Vec r_correction(const Plant& plant, const GoalFunction& goal, const Parametrization& parm,
                 const Vec& theta_hat, double u, const Vec& x, double t);

/// theta_I' = phi(psi) alpha + R.
Vec estimator_rhs_at(const Plant& plant, const TargetDynamics& target, const Parametrization& parm,
                     const Vec& theta_hat, double psi_value, const Vec& x, double u, double t);
Vec estimator_rhs(const GoalFunction& goal, const TargetDynamics& target, const Parametrization& parm,
                  const Plant& plant, const EstimatorState& est, const Vec& x, double u, double t);

/// V = 1/2 ||theta_hat - theta||^2_{Gamma^{-1}} + (D / 4 D1^2) tail^2.
double lyapunov_value(const Vec& theta_hat, const Vec& theta_true, const Mat& gamma_chol,
                      double eps_l2_tail, double D, double D1);

/// D_f = sqrt(D/2 ||theta - theta_hat0||^2_{Gamma^{-1}}) + (D/D1) ||eps||_2.
double mismatch_l2_bound(const Vec& theta_hat0, const Vec& theta_true, const Mat& gamma_chol,
                         double D, double eps_l2, double D1);

struct EquivalenceReport {
    double max_residual = 0.0;
    std::size_t samples_checked = 0;
    std::size_t samples_skipped = 0;  // stencils overlapping event samples
};

/// Compares the centered finite difference of the recorded theta_hat channel
/// against Gamma((psi' + phi(psi)) alpha - B (f2(x,theta) - f2(x,theta_hat)))
/// with psi' also by centered difference. Requires channels psi, theta_hat,
/// alpha; an optional 0/1 "event" channel marks samples (plant-parameter
/// switches, gating-region changes) whose stencils are excluded.
/// settle_window additionally excludes stencils within that many seconds of
/// the start or of any event: the identity presumes frozen plant parameters,
/// and a stiff estimator's settling layer after a switch can be narrower
/// than the recording grid.
EquivalenceReport virtual_equivalence_check(const Trace& trace, const Parametrization& parm,
                                            const Plant& plant, const TargetDynamics& target,
                                            const Mat& Gamma, double settle_window = 0.0);

}  // namespace adaptsim
