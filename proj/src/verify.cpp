#include "adaptsim/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace adaptsim {

namespace {

constexpr double kViolationTol = -1e-12;

double fd_step(double xi) { return 1e-6 * std::max(1.0, std::fabs(xi)); }

/// d(alpha_i)/d(x2) row for all i: columns q..n-1 of the alpha Jacobian.
Mat alpha_x2_jacobian(const Parametrization& parm, int q, const Vec& x, double t) {
    const Mat full = parm.alpha_jacobian(x, t);
    Mat out(parm.d, full.cols() - q);
    for (int i = 0; i < parm.d; ++i)
        for (int j = q; j < full.cols(); ++j) out(i, j - q) = full(i, j);
    return out;
}

Mat psi_comp_x2_jacobian(const Parametrization& parm, int q, const Vec& x, double t) {
    const Mat full = parm.psi_comp_jacobian(x, t);
    Mat out(parm.d, full.cols() - q);
    for (int i = 0; i < parm.d; ++i)
        for (int j = q; j < full.cols(); ++j) out(i, j - q) = full(i, j);
    return out;
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate_adaptive(const std::function<double(double)>& f, double a, double b, double tol) {
    if (a == b) return 0.0;
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 40);
}

}  // namespace

MonotonicityReport check_monotonicity(const Parametrization& parm, const std::vector<Vec>& x_grid,
                                      const std::vector<std::pair<Vec, Vec>>& theta_pairs,
                                      double t, Exec exec) {
    const std::int64_t nx = static_cast<std::int64_t>(x_grid.size());
    const std::int64_t np = static_cast<std::int64_t>(theta_pairs.size());
    const std::int64_t total = nx * np;

    MonotonicityReport rep;
    rep.tuples = static_cast<std::size_t>(total);
    if (total == 0) return rep;

    double margin = std::numeric_limits<double>::infinity();
    std::int64_t violations = 0;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(min : margin) reduction(+ : violations) if (exec == Exec::parallel)
#endif
    for (std::int64_t idx = 0; idx < total; ++idx) {
        const auto& [th, th_hat] = theta_pairs[static_cast<std::size_t>(idx / nx)];
        const Vec& x = x_grid[static_cast<std::size_t>(idx % nx)];
        const double df = parm.f(x, th_hat, t) - parm.f(x, th, t);
        const double along = dot(parm.alpha(x, t), th_hat - th);
        const double prod = df * along;
        margin = std::min(margin, prod);
        if (prod < kViolationTol) ++violations;
    }
    rep.margin = margin;
    rep.violations = static_cast<std::size_t>(violations);

    if (violations > 0) {
        for (std::int64_t idx = 0; idx < total && rep.first_violations.size() < 16; ++idx) {
            const auto& [th, th_hat] = theta_pairs[static_cast<std::size_t>(idx / nx)];
            const Vec& x = x_grid[static_cast<std::size_t>(idx % nx)];
            const double prod = (parm.f(x, th_hat, t) - parm.f(x, th, t)) *
                                dot(parm.alpha(x, t), th_hat - th);
            if (prod < kViolationTol) rep.first_violations.push_back(static_cast<std::size_t>(idx));
        }
    }
    return rep;
}

GrowthBounds estimate_growth_bounds(const Parametrization& parm, const std::vector<Vec>& x_grid,
                                    const std::vector<std::pair<Vec, Vec>>& theta_pairs,
                                    double t, Exec exec) {
    const std::int64_t nx = static_cast<std::int64_t>(x_grid.size());
    const std::int64_t np = static_cast<std::int64_t>(theta_pairs.size());
    const std::int64_t total = nx * np;

    double dmax = 0.0;
    double dmin = std::numeric_limits<double>::infinity();
    std::int64_t used = 0;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(max : dmax) reduction(min : dmin) \
    reduction(+ : used) if (exec == Exec::parallel)
#endif
    for (std::int64_t idx = 0; idx < total; ++idx) {
        const auto& [th, th_hat] = theta_pairs[static_cast<std::size_t>(idx / nx)];
        const Vec& x = x_grid[static_cast<std::size_t>(idx % nx)];
        const double along = std::fabs(dot(parm.alpha(x, t), th_hat - th));
        if (along <= 1e-12) continue;
        const double ratio = std::fabs(parm.f(x, th_hat, t) - parm.f(x, th, t)) / along;
        dmax = std::max(dmax, ratio);
        dmin = std::min(dmin, ratio);
        ++used;
    }
    if (used == 0) throw DegenerateGrid("estimate_growth_bounds: every tuple filtered out");
    GrowthBounds gb;
    gb.D_est = dmax;
    gb.D1_est = dmin;
    gb.used = static_cast<std::size_t>(used);
    gb.skipped = static_cast<std::size_t>(total - used);
    return gb;
}

Mat realizability_residual(const Parametrization& parm, const GoalFunction& goal, int q,
                           const Vec& x, double t) {
    const int p = static_cast<int>(x.size()) - q;
    const double psi = goal.psi(x, t);
    const Mat dpsi = psi_comp_x2_jacobian(parm, q, x, t);
    const Mat dalpha = alpha_x2_jacobian(parm, q, x, t);
    Mat res(parm.d, p);
    const Mat b = parm.b_matrix(x, t, p);
    for (int i = 0; i < parm.d; ++i)
        for (int j = 0; j < p; ++j) res(i, j) = dpsi(i, j) - psi * dalpha(i, j) - b(i, j);
    return res;
}

double poincare_check(const Parametrization& parm, const GoalFunction& goal, int q,
                      const std::vector<Vec>& x_grid, double t) {
    const int n = static_cast<int>(x_grid.empty() ? 0 : x_grid.front().size());
    const int p = n - q;
    double worst = 0.0;
    for (const Vec& x0 : x_grid) {
        for (int i = 0; i < parm.d; ++i) {
            // M_i(j,l) = d/dx2_j [ psi * dalpha_i/dx2_l + B_i_l ]
            Mat m(p, p);
            Vec xp = x0, xm = x0;
            for (int j = 0; j < p; ++j) {
                const int cj = q + j;
                const double h = fd_step(x0[static_cast<std::size_t>(cj)]);
                xp[static_cast<std::size_t>(cj)] += h;
                xm[static_cast<std::size_t>(cj)] -= h;
                const Mat da_p = alpha_x2_jacobian(parm, q, xp, t);
                const Mat da_m = alpha_x2_jacobian(parm, q, xm, t);
                const Mat b_p = parm.b_matrix(xp, t, p);
                const Mat b_m = parm.b_matrix(xm, t, p);
                const double psi_p = goal.psi(xp, t);
                const double psi_m = goal.psi(xm, t);
                for (int l = 0; l < p; ++l) {
                    const double vp = psi_p * da_p(i, l) + b_p(i, l);
                    const double vm = psi_m * da_m(i, l) + b_m(i, l);
                    m(j, l) = (vp - vm) / (2.0 * h);
                }
                xp[static_cast<std::size_t>(cj)] = x0[static_cast<std::size_t>(cj)];
                xm[static_cast<std::size_t>(cj)] = x0[static_cast<std::size_t>(cj)];
            }
            worst = std::max(worst, m.asymmetry());
        }
    }
    return worst;
}

Vec psi_by_quadrature(const Parametrization& parm, const GoalFunction& goal, int q, int k,
                      const Vec& x, double t, double tol) {
    const int n = static_cast<int>(x.size());
    const int p = n - q;
    const int ck = q + k;

    // probe: psi and alpha must not depend on the other x2 components
    for (int j = 0; j < p; ++j) {
        if (j == k) continue;
        const int cj = q + j;
        Vec xp = x;
        const double step = 1e-3 * std::max(1.0, std::fabs(x[static_cast<std::size_t>(cj)]));
        xp[static_cast<std::size_t>(cj)] += step;
        const double scale = std::max(1.0, std::fabs(goal.psi(x, t)));
        if (std::fabs(goal.psi(xp, t) - goal.psi(x, t)) > 1e-8 * scale ||
            inf_norm(parm.alpha(xp, t) - parm.alpha(x, t)) > 1e-8)
            throw DependenceViolation("psi_by_quadrature: dependence on x2 component " +
                                      std::to_string(j));
    }

    Vec out(static_cast<std::size_t>(parm.d), 0.0);
    for (int i = 0; i < parm.d; ++i) {
        auto integrand = [&](double s) {
            Vec xs = x;
            xs[static_cast<std::size_t>(ck)] = s;
            const double psi = goal.psi(xs, t);
            // d alpha_i / d x2k by central difference at xs
            const double h = fd_step(s);
            Vec xsp = xs, xsm = xs;
            xsp[static_cast<std::size_t>(ck)] += h;
            xsm[static_cast<std::size_t>(ck)] -= h;
            const double da = (parm.alpha(xsp, t)[static_cast<std::size_t>(i)] -
                               parm.alpha(xsm, t)[static_cast<std::size_t>(i)]) /
                              (2.0 * h);
            return psi * da;
        };
        out[static_cast<std::size_t>(i)] =
            integrate_adaptive(integrand, 0.0, x[static_cast<std::size_t>(ck)], tol);
    }
    return out;
}

std::vector<GainProbe> empirical_gain(const TargetDynamics& target,
                                      const std::vector<std::function<double(double)>>& zeta_bank,
                                      const Vec& psi0_grid, double tf, double h, double cap) {
    std::vector<GainProbe> table;
    for (const auto& zeta : zeta_bank) {
        // ||zeta||_2 on the run grid
        double acc = 0.0;
        const long steps = static_cast<long>(std::floor(tf / h + 1e-9));
        for (long kk = 0; kk < steps; ++kk) {
            const double a = zeta(kk * h);
            const double b = zeta((kk + 1) * h);
            acc += 0.5 * h * (a * a + b * b);
        }
        const double zl2 = std::sqrt(acc);

        for (const double psi0 : psi0_grid) {
            GainProbe probe;
            probe.zeta_l2 = zl2;
            probe.psi0 = psi0;
            double psi = psi0;
            double sup = std::fabs(psi0);
            for (long kk = 0; kk < steps; ++kk) {
                const double t = kk * h;
                auto rhs = [&](double pv, double tv) { return -target(pv, tv) + zeta(tv); };
                const double k1 = rhs(psi, t);
                const double k2 = rhs(psi + 0.5 * h * k1, t + 0.5 * h);
                const double k3 = rhs(psi + 0.5 * h * k2, t + 0.5 * h);
                const double k4 = rhs(psi + h * k3, t + h);
                psi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                sup = std::max(sup, std::fabs(psi));
                if (!std::isfinite(psi) || std::fabs(psi) > cap) {
                    probe.diverged = true;
                    break;
                }
            }
            probe.psi_inf = sup;
            table.push_back(probe);
        }
    }
    return table;
}

std::vector<Vec> grid_points(const Box& box, int per_dim) {
    const int d = box.dim();
    std::vector<Vec> pts;
    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    const std::size_t total = static_cast<std::size_t>(std::pow(per_dim, d));
    pts.reserve(total);
    for (std::size_t flat = 0; flat < total; ++flat) {
        Vec p(static_cast<std::size_t>(d));
        std::size_t rem = flat;
        for (int i = 0; i < d; ++i) {
            const int gi = static_cast<int>(rem % static_cast<std::size_t>(per_dim));
            rem /= static_cast<std::size_t>(per_dim);
            p[static_cast<std::size_t>(i)] =
                per_dim == 1 ? box.lo[static_cast<std::size_t>(i)]
                             : box.lo[static_cast<std::size_t>(i)] +
                                   (box.hi[static_cast<std::size_t>(i)] - box.lo[static_cast<std::size_t>(i)]) *
                                       gi / (per_dim - 1);
        }
        pts.push_back(std::move(p));
    }
    return pts;
}

std::vector<std::pair<Vec, Vec>> theta_pair_grid(const Box& box, int per_dim,
                                                 std::size_t max_pairs) {
    const std::vector<Vec> pts = grid_points(box, per_dim);
    const std::size_t m = pts.size();
    const std::size_t all = m * m;
    const std::size_t stride = std::max<std::size_t>(1, all / std::max<std::size_t>(1, max_pairs));
    std::vector<std::pair<Vec, Vec>> pairs;
    for (std::size_t flat = 0; flat < all; flat += stride)
        pairs.emplace_back(pts[flat / m], pts[flat % m]);
    return pairs;
}

}  // namespace adaptsim
