#include <cmath>

#include "adaptsim/closed_loop.hpp"
#include "adaptsim/runner.hpp"
#include "adaptsim/scenarios.hpp"
#include "doctest.h"

using namespace adaptsim;

namespace {

/// Spring-mass with linear damping f = theta*x2 (test fixture; the shipped
/// scenario uses theta*x2|x2|).
Plant linear_damping_plant(double k0, double theta) {
    Plant p;
    p.q = 1;
    p.p = 1;
    p.f1 = [](const Vec& x, double) -> Vec { return {x[1]}; };
    p.g1 = [](const Vec&, double) -> Vec { return {0.0}; };
    p.f2 = [k0](const Vec& x, const Vec& th, double) -> Vec { return {k0 * x[0] + th[0] * x[1]}; };
    p.g2 = [](const Vec&, double) -> Vec { return {1.0}; };
    p.theta_true = {theta};
    p.theta_domain = {{-2.0}, {2.0}};
    return p;
}

GoalFunction line_goal(double lambda) {
    GoalFunction g;
    g.psi = [lambda](const Vec& x, double) { return x[0] + lambda * x[1]; };
    return g;
}

TargetDynamics unit_target() {
    TargetDynamics t;
    t.omega = {1.0};
    t.phi = [](double psi, const Vec& om, double) { return om[0] * psi; };
    return t;
}

}  // namespace

TEST_CASE("control_input on the spring-mass example") {
    const Plant plant = linear_damping_plant(-1.0, 0.5);
    const GoalFunction goal = line_goal(1.0);
    const TargetDynamics target = unit_target();

    // x = (1, 0), theta_hat = 0: L_g psi = 1, L_f psi = x2 + k0 x1 = -1,
    // psi = 1, u = -(-1) - 1 = 0
    const double u = control_input(plant, goal, target, {0.0}, {1.0, 0.0}, 0.0);
    CHECK(u == doctest::Approx(0.0).epsilon(1e-9));

    SUBCASE("singular L_g psi") {
        Plant p2 = plant;
        p2.g2 = [](const Vec&, double) -> Vec { return {0.0}; };
        CHECK_THROWS_AS(control_input(p2, goal, target, {0.0}, {1.0, 0.0}, 0.0), SingularControl);
    }
}

TEST_CASE("certainty equivalence cancels: psi' + phi(psi) = 0 in closed loop") {
    ClosedLoopSpec spec;
    spec.plant = linear_damping_plant(-1.0, 0.7);
    spec.goal = line_goal(1.0);
    spec.goal.grad_x = [](const Vec&, double) -> Vec { return {1.0, 1.0}; };
    spec.goal.ddt = [](const Vec&, double) { return 0.0; };
    spec.target = unit_target();
    spec.parm.d = 1;
    spec.parm.f = [](const Vec& x, const Vec& th, double) {
        return x[1] + (-1.0 * x[0] + th[0] * x[1]);
    };
    spec.parm.alpha = [](const Vec& x, double) -> Vec { return {x[1]}; };
    // alpha depends on x2, so the compensator from the single-component
    // integral applies: Psi = int_0^{x2} (x1 + s) ds = x1 x2 + x2^2/2
    spec.parm.Psi = [](const Vec& x, double) -> Vec { return {x[0] * x[1] + 0.5 * x[1] * x[1]}; };
    spec.Gamma = Mat::diag({1.0});
    spec.theta_hat0 = {0.7};  // exact knowledge
    spec.dist = Disturbance::zero();

    Trace tr = run_closed_loop(spec, {1.0, 0.0}, 0.0, 3.0, 1e-3);
    const auto& psi = tr.channel("psi");
    // with theta_hat = theta, psi(t) must match psi0 e^{-t}
    for (std::size_t k = 0; k < tr.size(); k += 250) {
        const double expected = 1.0 * std::exp(-tr.times[k]);
        CHECK(psi[k][0] == doctest::Approx(expected).epsilon(1e-6));
    }
    // and theta_hat stays put
    const auto& th = tr.channel("theta_hat");
    CHECK(th.back()[0] == doctest::Approx(0.7).epsilon(1e-9));
}

TEST_CASE("theta_hat finite form") {
    SUBCASE("direct arithmetic, d = 2") {
        Parametrization parm;
        parm.d = 2;
        parm.alpha = [](const Vec&, double) -> Vec { return {1.0, 3.0}; };
        const EstimatorState est = make_estimator({1.0, -1.0}, Mat::identity(2));
        const Vec th = theta_hat_at(parm, est, 2.0, {0.0}, 0.0);
        CHECK(th[0] == doctest::Approx(3.0));
        CHECK(th[1] == doctest::Approx(5.0));
    }
    SUBCASE("slip-observer shape: gamma (psi + theta_I)") {
        Parametrization parm;
        parm.d = 1;
        parm.alpha = [](const Vec&, double) -> Vec { return {1.0}; };
        const EstimatorState est = make_estimator({0.004}, Mat::diag({100.0}));
        const Vec th = theta_hat_at(parm, est, 0.002, {0.0}, 0.0);
        CHECK(th[0] == doctest::Approx(100.0 * (0.002 + 0.004)));
    }
    SUBCASE("zero case") {
        Parametrization parm;
        parm.d = 1;
        parm.alpha = [](const Vec&, double) -> Vec { return {5.0}; };
        const EstimatorState est = make_estimator({0.0}, Mat::diag({3.0}));
        CHECK(theta_hat_at(parm, est, 0.0, {0.0}, 0.0)[0] == 0.0);
    }
    SUBCASE("Gamma must be SPD") {
        CHECK_THROWS(make_estimator({0.0}, Mat::diag({-1.0})));
    }
}

TEST_CASE("r_correction") {
    SUBCASE("constant alpha, no compensator: R = 0") {
        Plant plant = linear_damping_plant(-1.0, 0.5);
        Parametrization parm;
        parm.d = 1;
        parm.alpha = [](const Vec&, double) -> Vec { return {1.0}; };
        const Vec r = r_correction_at(plant, parm, {0.0}, 0.37, 2.0, {1.0, 0.5}, 0.0);
        CHECK(r[0] == doctest::Approx(0.0).epsilon(1e-9));
    }
    SUBCASE("sine scenario inside the middle region") {
        BuiltScenario sc = build_sine(SineConfig{});
        // x = (0.5, 0.2): alpha = x1, R = -psi * L_{f1} alpha = -psi * x2
        const Vec x = {0.5, 0.2};
        const double psi = sc.goal.psi(x, 0.0);
        const Vec r = r_correction_at(sc.plant, sc.parm, {1.0}, psi, 0.0, x, 0.0);
        CHECK(r[0] == doctest::Approx(-psi * 0.2).epsilon(1e-9));
    }
}

TEST_CASE("estimator_rhs") {
    Plant plant = linear_damping_plant(-1.0, 0.5);
    TargetDynamics target = unit_target();
    Parametrization parm;
    parm.d = 1;
    parm.alpha = [](const Vec&, double) -> Vec { return {1.0}; };
    SUBCASE("phi(psi) alpha with R = 0") {
        const Vec dthI = estimator_rhs_at(plant, target, parm, {0.0}, 0.3, {1.0, 0.0}, 0.0, 0.0);
        CHECK(dthI[0] == doctest::Approx(0.3).epsilon(1e-9));
    }
    SUBCASE("equilibrium on the target set") {
        const Vec dthI = estimator_rhs_at(plant, target, parm, {0.0}, 0.0, {1.0, 0.0}, 0.0, 0.0);
        CHECK(dthI[0] == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("lyapunov_value and mismatch_l2_bound") {
    const Mat i2 = *cholesky(Mat::identity(2));
    SUBCASE("exact estimate, no disturbance") {
        CHECK(lyapunov_value({1.0, 2.0}, {1.0, 2.0}, i2, 0.0, 1.0, 1.0) == 0.0);
    }
    SUBCASE("identity gain") {
        CHECK(lyapunov_value({3.0, 4.0}, {0.0, 0.0}, i2, 0.0, 1.0, 1.0) == doctest::Approx(12.5));
    }
    SUBCASE("scaled gain") {
        const Mat l = *cholesky(Mat::diag({2.0, 2.0}));
        CHECK(lyapunov_value({2.0, 0.0}, {0.0, 0.0}, l, 0.0, 1.0, 1.0) == doctest::Approx(1.0));
    }
    SUBCASE("bound arithmetic") {
        const Mat l1 = *cholesky(Mat::identity(2));
        CHECK(mismatch_l2_bound({0.0, 0.0}, {1.0, 0.0}, l1, 2.0, 0.0, 1.0) == doctest::Approx(1.0));
        CHECK(mismatch_l2_bound({1.0, 0.0}, {1.0, 0.0}, l1, 2.0, 0.0, 1.0) == 0.0);
    }
}

TEST_CASE("theta_hat trajectories do not depend on the Gamma factorization") {
    // Gamma enters only as the full matrix: runs with Gamma assembled from
    // two different factor orderings must agree exactly.
    Mat g(2, 2);
    g(0, 0) = 2.0;
    g(0, 1) = g(1, 0) = 0.5;
    g(1, 1) = 1.5;

    Mat l = *cholesky(g);
    Mat rebuilt(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            double s = 0.0;
            for (int k = 0; k < 2; ++k) s += l(i, k) * l(j, k);
            rebuilt(i, j) = s;
        }

    LinearConfig cfg;
    cfg.tf = 5.0;
    BuiltScenario a = build_linear(cfg);
    ClosedLoopSpec spec{a.plant, a.goal, a.target, a.parm, g, {0.0, 0.0}, Disturbance::zero(),
                        nullptr};
    ClosedLoopSpec spec2 = spec;
    spec2.Gamma = rebuilt;
    Trace ta = run_closed_loop(spec, {0.5}, 0.0, 2.0, 1e-3);
    Trace tb = run_closed_loop(spec2, {0.5}, 0.0, 2.0, 1e-3);
    const auto& tha = ta.channel("theta_hat");
    const auto& thb = tb.channel("theta_hat");
    for (std::size_t k = 0; k < ta.size(); k += 500) {
        CHECK(tha[k][0] == doctest::Approx(thb[k][0]).epsilon(1e-12));
        CHECK(tha[k][1] == doctest::Approx(thb[k][1]).epsilon(1e-12));
    }
}

TEST_CASE("virtual equivalence residual") {
    SUBCASE("constant theta_hat trace has zero residual") {
        // f known exactly and psi identically zero: theta_hat frozen
        ClosedLoopSpec spec;
        spec.plant = linear_damping_plant(-1.0, 0.4);
        spec.goal = line_goal(1.0);
        spec.target = unit_target();
        spec.parm.d = 1;
        spec.parm.f = [](const Vec& x, const Vec& th, double) {
            return x[1] + (-1.0 * x[0] + th[0] * x[1]);
        };
        spec.parm.alpha = [](const Vec&, double) -> Vec { return {1.0}; };
        spec.Gamma = Mat::diag({1.0});
        spec.theta_hat0 = {0.4};
        Trace tr = run_closed_loop(spec, {0.0, 0.0}, 0.0, 1.0, 1e-3);
        const auto rep = virtual_equivalence_check(tr, spec.parm, spec.plant, spec.target,
                                                   spec.Gamma);
        CHECK(rep.max_residual <= 1e-10);
    }
    SUBCASE("too short") {
        Trace tr = make_signal_trace("psi", [](double) -> Vec { return {0.0}; }, 0.0, 1e-3, 1e-3);
        Parametrization parm;
        parm.d = 1;
        parm.alpha = [](const Vec&, double) -> Vec { return {1.0}; };
        Plant plant = linear_damping_plant(-1.0, 0.0);
        CHECK_THROWS_AS(virtual_equivalence_check(tr, parm, plant, unit_target(), Mat::identity(1)),
                        TraceTooShort);
    }
    SUBCASE("residual is O(h^2): halving h shrinks it at least 3.5x") {
        SpringConfig cfg;
        cfg.tf = 2.0;
        cfg.h = 2e-3;
        BuiltScenario c1 = build_spring(cfg);
        cfg.h = 1e-3;
        BuiltScenario c2 = build_spring(cfg);
        const auto r1 = virtual_equivalence_check(c1.run(), c1.parm, c1.plant, c1.target, c1.Gamma);
        const auto r2 = virtual_equivalence_check(c2.run(), c2.parm, c2.plant, c2.target, c2.Gamma);
        CHECK(r1.max_residual / r2.max_residual >= 3.5);
    }
}

TEST_CASE("parametric norm stays inside the disturbance-inflated ball") {
    // with eps in L2, ||theta_hat(t)-theta||^2_{G^-1} never exceeds its
    // initial value plus D/(2 D1^2) ||eps||_2^2
    auto check_run = [](const BuiltScenario& sc, const Trace& tr) {
        const Mat chol = *cholesky(sc.Gamma);
        const auto& th = tr.channel("theta_hat");
        const auto& tt = tr.channel("theta_true");
        const auto& eps = tr.channel("eps");
        const double v0 = quad_form_inv(chol, th[0] - tt[0]);
        double eps2 = 0.0;
        double worst = -1e300;
        for (std::size_t k = 1; k < tr.size(); ++k) {
            const double dt = tr.times[k] - tr.times[k - 1];
            eps2 += 0.5 * dt * (eps[k - 1][0] * eps[k - 1][0] + eps[k][0] * eps[k][0]);
            const double cap = v0 + sc.parm.D / (2.0 * sc.parm.D1 * sc.parm.D1) * eps2;
            worst = std::max(worst, quad_form_inv(chol, th[k] - tt[k]) - cap);
        }
        return worst;
    };
    DisturbanceSpec dist;
    dist.kind = "exp";
    dist.a = 0.1;
    dist.b = 1.0;
    {
        SpringConfig cfg;
        cfg.eps = dist;
        cfg.tf = 20.0;
        BuiltScenario sc = build_spring(cfg);
        CHECK(check_run(sc, sc.run()) <= 1e-9);
    }
    {
        SineConfig cfg;
        cfg.eps = dist;
        cfg.tf = 20.0;
        BuiltScenario sc = build_sine(cfg);
        CHECK(check_run(sc, sc.run()) <= 1e-9);
    }
}

TEST_CASE("mismatch slack fallback on a hand-built trace") {
    // constant mismatch 0.5 over [0, 1], no disturbance, theta offset 1,
    // D = D1 = 1, Gamma = I: bound = sqrt(1/2), running L2 = 0.5 sqrt(t)
    Trace tr;
    tr.channel_names = {"mismatch", "eps", "theta_hat", "theta_true"};
    tr.channels.resize(4);
    for (int k = 0; k <= 100; ++k) {
        tr.times.push_back(0.01 * k);
        tr.states.push_back({0.0});
        tr.channels[0].push_back({0.5});
        tr.channels[1].push_back({0.0});
        tr.channels[2].push_back({1.0});
        tr.channels[3].push_back({0.0});
    }
    const Mat chol = *cholesky(Mat::identity(1));
    const double slack = p1_worst_slack(tr, chol, 1.0, 1.0);
    CHECK(slack == doctest::Approx(std::sqrt(0.5) - 0.5).epsilon(1e-9));
}
