#pragma once

#include "adaptsim/adapt_core.hpp"
#include "adaptsim/verify.hpp"

namespace adaptsim {
namespace fixtures {

/// Library parametrizations for the monotonicity and growth-bound checks.
/// Each fixture bundles the nonlinearity, its alpha, and the grids over its
/// domain of physical relevance.
struct Fixture {
    std::string name;
    Parametrization parm;
    std::vector<Vec> x_grid;
    std::vector<std::pair<Vec, Vec>> theta_pairs;
};

/// Stiction force theta0 exp(-x2^2 theta1), handled in the exponent-space
/// coordinates (theta1, ln theta0) where the monotone-functional form is
/// exact; alpha = (-x2^2, 1).
Fixture stiction(int per_dim = 20);

/// Same with the sign of alpha flipped: the negative control.
Fixture stiction_sign_flipped(int per_dim = 20);

/// Steady-state tyre-road friction with alpha = x3/(1-x3), scalar theta.
Fixture tyre_road(int per_dim = 20);

/// Monod growth-rate nonlinearities x1 x2/(th0 + th1 x1) and
/// x1 x2/(th0 + th1 x2); alpha = -x1 x2 (1, x1) and -x1 x2 (1, x2).
Fixture monod_substrate(int per_dim = 20);
Fixture monod_biomass(int per_dim = 20);

}  // namespace fixtures
}  // namespace adaptsim
