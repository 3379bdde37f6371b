#pragma once

#include <utility>

#include "adaptsim/adapt_core.hpp"
#include "adaptsim/parallel.hpp"

namespace adaptsim {

struct MonotonicityReport {
    std::size_t tuples = 0;
    std::size_t violations = 0;
    double margin = 0.0;  // min of (f(x,th')-f(x,th)) * alpha'(th'-th) over the grid
    std::vector<std::size_t> first_violations;  // up to 16 tuple indices
};

/// Evaluates the monotonicity product on every (x, theta pair) tuple; values
/// below -1e-12 count as violations. Tuple index = pair_index * |x_grid| + x_index.
MonotonicityReport check_monotonicity(const Parametrization& parm, const std::vector<Vec>& x_grid,
                                      const std::vector<std::pair<Vec, Vec>>& theta_pairs,
                                      double t = 0.0, Exec exec = Exec::parallel);

struct GrowthBounds {
    double D_est = 0.0;   // max |f(x,th')-f(x,th)| / |alpha'(th'-th)|
    double D1_est = 0.0;  // min of the same ratio
    std::size_t used = 0;
    std::size_t skipped = 0;  // |alpha'(th'-th)| <= 1e-12
};

GrowthBounds estimate_growth_bounds(const Parametrization& parm, const std::vector<Vec>& x_grid,
                                    const std::vector<std::pair<Vec, Vec>>& theta_pairs,
                                    double t = 0.0, Exec exec = Exec::parallel);

/// d x p residual dPsi/dx2 - psi dalpha/dx2 - B at one point; entrywise small
/// residual certifies the finite form realizes the virtual algorithm.
Mat realizability_residual(const Parametrization& parm, const GoalFunction& goal, int q,
                           const Vec& x, double t);

/// Max over the grid and over components i of the asymmetry
/// ||M_i - M_i'||_inf, M_i = d/dx2 (psi dalpha_i/dx2 + B_i); near zero
/// certifies solvability for Psi.
double poincare_check(const Parametrization& parm, const GoalFunction& goal, int q,
                      const std::vector<Vec>& x_grid, double t);

/// Psi(x,t) = int_0^{x2k} psi * dalpha/dx2k ds by adaptive Simpson quadrature.
/// Probes that psi and alpha depend on no other x2 component first.
Vec psi_by_quadrature(const Parametrization& parm, const GoalFunction& goal, int q, int k,
                      const Vec& x, double t, double tol = 1e-8);

struct GainProbe {
    double zeta_l2 = 0.0;
    double psi0 = 0.0;
    double psi_inf = 0.0;
    bool diverged = false;
};

/// Simulates psi' = -phi(psi) + zeta(t) for each (psi0, zeta) and tabulates
/// the observed sup norms; per-run entries exceeding the cap are flagged as
/// divergent instead of aborting the table.
std::vector<GainProbe> empirical_gain(const TargetDynamics& target,
                                      const std::vector<std::function<double(double)>>& zeta_bank,
                                      const Vec& psi0_grid, double tf, double h,
                                      double cap = 1e6);

/// Axis-aligned grid helpers (deterministic ordering).
std::vector<Vec> grid_points(const Box& box, int per_dim);
std::vector<std::pair<Vec, Vec>> theta_pair_grid(const Box& box, int per_dim,
                                                 std::size_t max_pairs);

}  // namespace adaptsim
