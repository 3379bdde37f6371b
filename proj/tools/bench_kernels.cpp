// Times the serial reference implementations against the OpenMP kernels on
// synthetic workloads and prints a speedup table. The consistency tests
// (tests/test_parallel.cpp) assert the two paths agree bit-for-bit.

#include <chrono>
#include <cmath>
#include <cstdio>

#include "adaptsim/excitation.hpp"
#include "adaptsim/fixtures.hpp"
#include "adaptsim/verify.hpp"

using namespace adaptsim;

namespace {

template <class F>
double time_ms(F&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

void row(const char* name, double serial_ms, double parallel_ms) {
    std::printf("%-28s %10.1f ms %10.1f ms   x%.2f\n", name, serial_ms, parallel_ms,
                serial_ms / parallel_ms);
}

}  // namespace

int main() {
    std::printf("threads: %d\n", max_threads());
    std::printf("%-28s %13s %13s %8s\n", "kernel", "serial", "parallel", "speedup");

    {
        const auto fx = fixtures::tyre_road(36);
        MonotonicityReport a, b;
        const double ts = time_ms([&] { a = check_monotonicity(fx.parm, fx.x_grid, fx.theta_pairs, 0.0, Exec::serial); });
        const double tp = time_ms([&] { b = check_monotonicity(fx.parm, fx.x_grid, fx.theta_pairs, 0.0, Exec::parallel); });
        row("monotonicity grid", ts, tp);
        if (a.margin != b.margin) std::printf("  MISMATCH!\n");
    }
    {
        const auto fx = fixtures::stiction(32);
        GrowthBounds a, b;
        const double ts = time_ms([&] { a = estimate_growth_bounds(fx.parm, fx.x_grid, fx.theta_pairs, 0.0, Exec::serial); });
        const double tp = time_ms([&] { b = estimate_growth_bounds(fx.parm, fx.x_grid, fx.theta_pairs, 0.0, Exec::parallel); });
        row("growth-bound grid", ts, tp);
        if (a.D_est != b.D_est || a.D1_est != b.D1_est) std::printf("  MISMATCH!\n");
    }
    {
        const Trace tr = make_signal_trace(
            "alpha",
            [](double t) -> Vec {
                return {std::sin(t), std::cos(t), std::sin(0.5 * t), std::cos(1.7 * t)};
            },
            0.0, 400.0, 1e-3);
        PeScan a, b;
        const double ts = time_ms([&] { a = measure_pe(tr, "alpha", 6.0, Exec::serial); });
        const double tp = time_ms([&] { b = measure_pe(tr, "alpha", 6.0, Exec::parallel); });
        row("pe window scan", ts, tp);
        if (a.delta_inf != b.delta_inf) std::printf("  MISMATCH!\n");
    }
    {
        const Trace tr = make_signal_trace(
            "x", [](double t) -> Vec { return {std::sin(t), std::cos(t)}; }, 0.0, 60.0, 1e-3);
        auto f = [](const Vec& s, const Vec& th, double) {
            return s[0] * th[0] + s[1] * th[1] + 0.1 * std::sin(th[0] * th[1]);
        };
        std::vector<std::pair<Vec, Vec>> pairs;
        for (int i = 0; i < 40; ++i)
            for (int j = 0; j < 40; ++j)
                pairs.push_back({{0.05 * i, 0.03 * j}, {0.03 * j, 0.05 * i}});
        std::vector<EnvelopePoint> a, b;
        const double ts = time_ms([&] { a = nonlinear_pe_probe(f, tr, pairs, 6.283, 16, Exec::serial); });
        const double tp = time_ms([&] { b = nonlinear_pe_probe(f, tr, pairs, 6.283, 16, Exec::parallel); });
        row("nonlinear pe probe", ts, tp);
        if (a.size() != b.size()) std::printf("  MISMATCH!\n");
    }
    return 0;
}
