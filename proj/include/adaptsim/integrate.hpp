#pragma once

#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "adaptsim/errors.hpp"
#include "adaptsim/linalg.hpp"

namespace adaptsim {

/// State of the controlled system: x = x1 (+) x2 with the first q entries
/// forming the uncertainty-independent partition.
struct SystemState {
    Vec x;
    int q = 0;
    double t = 0.0;

    int n() const { return static_cast<int>(x.size()); }
    int p() const { return n() - q; }
};

using RhsFn = std::function<void(const Vec& x, double t, Vec& dx)>;

/// Classical 4th-order Runge-Kutta update. Throws NonFiniteDerivative if any
/// stage produces a non-finite entry.
Vec rk4_step(const RhsFn& rhs, const Vec& x, double t, double h);

struct StopCondition {
    enum class Cmp { le, ge };
    int index = -1;  // -1: never fires
    Cmp cmp = Cmp::le;
    double threshold = 0.0;

    static StopCondition none() { return {}; }
    static StopCondition component_le(int index, double threshold) {
        return {index, Cmp::le, threshold};
    }
    static StopCondition component_ge(int index, double threshold) {
        return {index, Cmp::ge, threshold};
    }
    bool fires(const Vec& x) const {
        if (index < 0) return false;
        const double v = x[static_cast<std::size_t>(index)];
        return cmp == Cmp::le ? v <= threshold : v >= threshold;
    }
};

/// Named per-step channel recorder. Recorders may carry state (e.g. the
/// previous region for event marking); they are invoked once per recorded
/// sample, in order.
struct Observer {
    std::string name;
    int dim = 1;
    std::function<Vec(const Vec& x, double t)> eval;
};

struct Trace {
    std::vector<double> times;
    std::vector<Vec> states;
    std::vector<std::string> channel_names;
    std::vector<std::vector<Vec>> channels;  // [channel][sample]
    bool stopped = false;                    // a StopCondition fired

    std::size_t size() const { return times.size(); }
    double step() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }
    int channel_index(std::string_view name) const;
    const std::vector<Vec>& channel(std::string_view name) const;  // throws UnknownChannel
};

struct SimulateOptions {
    double divergence_cap = 1e12;
    int substeps = 1;  // internal RK4 substeps per recorded step
    /// Called with the committed state right before integrating each recorded
    /// step (per-step controller updates, e.g. the slip-target refresh).
    std::function<void(const Vec& x, double t)> on_step_begin;
};

/// Fixed-step loop from t0 to tf (or until the stop condition fires), with
/// the state recorded at every grid time t0 + k*h. Throws Diverged when any
/// state entry exceeds the cap.
Trace simulate(const RhsFn& rhs, const Vec& x0, double t0, double tf, double h,
               const StopCondition& stop, std::vector<Observer> observers,
               const SimulateOptions& opt = {});

enum class Norm { l2, linf };

/// Functional norm of a recorded channel over [ta, tb]: trapezoid quadrature
/// of the squared Euclidean sample norms for l2, max sample norm for linf.
double signal_norm(const Trace& trace, std::string_view channel, Norm p, double ta, double tb);

/// Convenience: a trace holding one named channel sampled from a function,
/// for the excitation oracles.
Trace make_signal_trace(const std::string& name, const std::function<Vec(double)>& fn,
                        double t0, double tf, double h);

}  // namespace adaptsim
