#pragma once

#include "adaptsim/adapt_core.hpp"

namespace adaptsim {

/// Full adaptive loop: plant driven by the certainty-equivalence control,
/// finite-form estimator integrated alongside as augmented state, and the
/// goal value integrated as its own channel. The disturbance eps(t) enters
/// the measured psi' path as the minimal unmodeled state perturbation
/// (grad psi / ||grad psi||^2) * eps, which adds exactly +eps to psi' while
/// keeping the finite-form identities exact. Augmented layout:
/// [x(0..n-1), psi, theta_I(0..d-1), int mismatch^2].
struct ClosedLoopSpec {
    Plant plant;
    GoalFunction goal;
    TargetDynamics target;
    Parametrization parm;
    Mat Gamma;
    Vec theta_hat0;
    Disturbance dist;
    /// Diagnostic region id (gating scenarios); a change between consecutive
    /// samples is flagged on the "event" channel. Null means one region.
    std::function<int(const Vec& x, double t)> region;
    double singular_tol = kSingularTol;
};

RhsFn closed_loop_rhs(const ClosedLoopSpec& spec);

Vec closed_loop_initial(const ClosedLoopSpec& spec, const Vec& x0, double t0);

std::vector<Observer> closed_loop_observers(const ClosedLoopSpec& spec);

Trace run_closed_loop(const ClosedLoopSpec& spec, const Vec& x0, double t0, double tf, double h,
                      const StopCondition& stop = StopCondition::none(),
                      const SimulateOptions& opt = {});

}  // namespace adaptsim
