#include "adaptsim/fixtures.hpp"

#include <cmath>

#include "adaptsim/scenarios.hpp"

namespace adaptsim {
namespace fixtures {

namespace {

// grid budgets chosen so each fixture lands near 20^4 tuples total
std::size_t pair_budget(std::size_t x_points, int per_dim) {
    const std::size_t target = static_cast<std::size_t>(per_dim) * per_dim * per_dim * per_dim;
    return std::max<std::size_t>(1, target / std::max<std::size_t>(1, x_points));
}

}  // namespace

Fixture stiction(int per_dim) {
    Fixture fx;
    fx.name = "stiction";
    fx.parm.d = 2;
    // theta = (theta1, ln theta0): f = exp(-x2^2 theta1 + theta2)
    fx.parm.f = [](const Vec& x, const Vec& th, double) {
        return std::exp(-x[1] * x[1] * th[0] + th[1]);
    };
    fx.parm.alpha = [](const Vec& x, double) -> Vec { return {-x[1] * x[1], 1.0}; };

    Box xbox{{-1.0, -2.0}, {1.0, 2.0}};
    fx.x_grid = grid_points(xbox, per_dim);
    Box tbox{{0.1, std::log(0.1)}, {2.0, std::log(2.0)}};
    fx.theta_pairs = theta_pair_grid(tbox, per_dim, pair_budget(fx.x_grid.size(), per_dim));
    return fx;
}

Fixture stiction_sign_flipped(int per_dim) {
    Fixture fx = stiction(per_dim);
    fx.name = "stiction-sign-flipped";
    auto base = fx.parm.alpha;
    fx.parm.alpha = [base](const Vec& x, double t) { return -1.0 * base(x, t); };
    return fx;
}

Fixture tyre_road(int per_dim) {
    Fixture fx;
    fx.name = "tyre-road";
    fx.parm.d = 1;
    const LugreParams p;
    fx.parm.f = [p](const Vec& x, const Vec& th, double) {
        return lugre_friction(p, x[1], x[2], th[0]);
    };
    fx.parm.alpha = [](const Vec& x, double) -> Vec { return {x[2] / (1.0 - x[2])}; };

    // x = (x1, x2, x3); x1 does not enter the friction law
    fx.x_grid = grid_points(Box{{20.0, 0.05}, {120.0, 0.5}}, per_dim);
    for (auto& pt : fx.x_grid) pt = Vec{10.0, pt[0], pt[1]};

    Box tbox{{0.3}, {1.5}};
    fx.theta_pairs = theta_pair_grid(tbox, per_dim, pair_budget(fx.x_grid.size(), per_dim));
    return fx;
}

namespace {

Fixture monod(const std::string& name, bool substrate, int per_dim) {
    Fixture fx;
    fx.name = name;
    fx.parm.d = 2;
    fx.parm.f = [substrate](const Vec& x, const Vec& th, double) {
        const double denom = th[0] + th[1] * (substrate ? x[0] : x[1]);
        return x[0] * x[1] / denom;
    };
    // decreasing in th0 + th1 * x_i, so the monotone direction carries a
    // negative sign
    fx.parm.alpha = [substrate](const Vec& x, double) -> Vec {
        const double s = -x[0] * x[1];
        return {s, s * (substrate ? x[0] : x[1])};
    };
    Box xbox{{0.1, 0.1}, {3.0, 3.0}};
    fx.x_grid = grid_points(xbox, per_dim);
    Box tbox{{0.2, 0.2}, {2.0, 2.0}};
    fx.theta_pairs = theta_pair_grid(tbox, per_dim, pair_budget(fx.x_grid.size(), per_dim));
    return fx;
}

}  // namespace

Fixture monod_substrate(int per_dim) { return monod("monod-substrate", true, per_dim); }
Fixture monod_biomass(int per_dim) { return monod("monod-biomass", false, per_dim); }

}  // namespace fixtures
}  // namespace adaptsim
