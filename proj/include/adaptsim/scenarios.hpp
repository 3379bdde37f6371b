#pragma once

#include <optional>

#include "adaptsim/closed_loop.hpp"

namespace adaptsim {

// ---------------------------------------------------------------------------
// wheel-slip braking pieces

struct LugreParams {
    double sigma0 = 200.0;   // normalized rubber longitudinal stiffness
    double L_patch = 0.25;   // road contact patch length (m)
    double muC = 0.5;
    double muS = 0.9;
    double vs = 12.5;        // Stribeck velocity (m/s)
    double r = 0.3;          // wheel radius (m)
    double m = 200.0;        // mass (kg)
    double J = 0.23;         // moment of inertia (kg m^2)
    double Fn = 3000.0;      // load force (N)
    double Ks = 30.0;        // slip-tracking gain
};

/// Steady-state tyre-road friction force (N). Accepts x3 in [0, 1) with
/// Fs(0) = 0 as the continuous limit; throws SlipOutOfRange otherwise.
double lugre_friction(const LugreParams& p, double x2, double x3, double theta);

/// argmax of Fs over x3 by grid search on [0.01, 0.6] at resolution 1e-3,
/// ties broken toward the smallest slip.
double optimal_slip(const LugreParams& p, double theta, double x2);

/// Piecewise-constant road condition theta(s), s = travelled distance.
struct RoadProfile {
    // value applies while s <= edge; last entry has edge = +inf
    struct Piece {
        double edge;
        double theta;
    };
    std::vector<Piece> pieces;

    double theta_at(double s) const;
    int segment_index(double s) const;
    static RoadProfile braking_case();  // {[0,8]:0.3, (8,16]:1.3, (16,24]:0.7,
                                        //  (24,32]:0.4, (32,40]:1.5, (40,inf):0.6}
};

/// Wheel dynamics (x1 speed, x2 angular rate, x3 slip) for the given friction
/// force and brake torque.
Vec wheel_rhs(const LugreParams& p, const Vec& x, double theta, double u);

/// One evaluation of the braking loop: certainty-equivalence torque, observer
/// derivative, estimator pieces. aug = [x1, x2, x3, xhat3, s, theta_I].
struct SlipLoopEval {
    double u = 0.0;
    double x3_star = 0.0;
    double theta_hat = 0.0;
    double psi = 0.0;         // observer error, oriented so the PI loop is stable
    double dxhat3 = 0.0;
    double dtheta_I = 0.0;
    double theta_true = 0.0;  // road value at s
    double mismatch = 0.0;    // f(x,theta) - f(x,theta_hat)
};

SlipLoopEval slip_control_loop_step(const LugreParams& p, const Vec& aug, const RoadProfile& road,
                                    double gamma, double x3_star_cached);

/// Trapezoid integral of x1 over a stopped wheel trace (meters).
double braking_distance(const Trace& trace);

// ---------------------------------------------------------------------------
// local monotonicity domain for the sin(theta x1) scenario

struct OmegaM {
    struct Interval {
        double lo, hi;
        double sign;  // alpha = sign * x1 on the interval
    };
    std::vector<Interval> intervals;

    /// Region index, or -1 outside (adaptation frozen there).
    int region(double x1) const;
    /// alpha(x1): sign * x1 inside, 0 outside.
    double alpha(double x1) const;
    static OmegaM sine_default();  // [-3.38,-2.59] u [-1.14,1.14] u [2.59,3.38]
};

// ---------------------------------------------------------------------------
// scenario configurations (defaults = the built-in case studies)

struct DisturbanceSpec {
    std::string kind = "none";  // none | exp
    double a = 0.0, b = 1.0;    // a*exp(-b t)
    Disturbance build() const;
};

struct SpringConfig {
    double k0 = -1.0;
    double lambda = 1.0;
    double theta = 1.2;
    double theta_hat0 = 0.0;
    double gamma = 2.0;
    double omega = 1.0;  // phi(psi) = omega * psi
    double x10 = 1.0, x20 = 0.0;
    double t0 = 0.0, tf = 30.0, h = 1e-3;
    DisturbanceSpec eps;
};

struct SineConfig {
    double theta = 1.0;  // in [0.6, 1.4]
    double theta_hat0 = 0.8;
    double gamma = 5.0;
    double lambda = 1.0;
    double omega = 1.0;
    double x10 = 0.8, x20 = 0.0;
    double t0 = 0.0, tf = 30.0, h = 1e-3;
    DisturbanceSpec eps;
};

struct AbsConfig {
    LugreParams p;
    double gamma = 100.0;
    double theta_hat0 = 0.9;
    double x10 = kAbsCalibratedSpeed;
    double delta1 = 5.0;        // stop threshold (m/s)
    double x3_star_fixed = 0.0; // 0 = adaptive (on-line optimal slip)
    double t0 = 0.0, tf = 60.0, h = 1e-3;
    DisturbanceSpec eps;
    RoadProfile road = RoadProfile::braking_case();

    /// Initial speed pinned by the x1(0) calibration sweep (see README).
    static constexpr double kAbsCalibratedSpeed = 33.33;
};

struct LinearConfig {
    Vec theta = {0.8, 0.6};
    Vec theta_hat0 = {0.0, 0.0};
    double gamma = 1.0;
    double omega = 1.0;
    double x0 = 0.5;
    double t0 = 0.0, tf = 500.0, h = 1e-3;
    DisturbanceSpec eps;
};

/// A scenario assembled and ready to run, with the evaluator objects the
/// verification and excitation layers need.
struct BuiltScenario {
    std::string name;
    Plant plant;
    GoalFunction goal;
    TargetDynamics target;
    Parametrization parm;
    Mat Gamma;
    Vec theta_hat0;
    double t0 = 0.0, tf = 0.0, h = 1e-3;
    int substeps = 1;
    bool wheel = false;
    double pe_window = 0.0;  // 0 = skip PE analysis by default

    std::function<Trace()> run;

    // preflight material
    std::vector<Vec> x_grid;
    std::vector<std::pair<Vec, Vec>> theta_pairs;
    std::vector<Vec> realizability_probes;
};

BuiltScenario build_spring(const SpringConfig& cfg);
BuiltScenario build_sine(const SineConfig& cfg);
BuiltScenario build_abs(const AbsConfig& cfg);
BuiltScenario build_linear(const LinearConfig& cfg);

}  // namespace adaptsim
