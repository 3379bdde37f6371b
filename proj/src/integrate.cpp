#include "adaptsim/integrate.hpp"

#include <algorithm>
#include <cmath>

namespace adaptsim {

namespace {

void check_finite_dx(const Vec& dx, double t) {
    if (!all_finite(dx))
        throw NonFiniteDerivative("non-finite derivative at t=" + std::to_string(t));
}

}  // namespace

Vec rk4_step(const RhsFn& rhs, const Vec& x, double t, double h) {
    const std::size_t n = x.size();
    Vec k1(n), k2(n), k3(n), k4(n), tmp(n);
    rhs(x, t, k1);
    check_finite_dx(k1, t);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
    rhs(tmp, t + 0.5 * h, k2);
    check_finite_dx(k2, t);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
    rhs(tmp, t + 0.5 * h, k3);
    check_finite_dx(k3, t);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
    rhs(tmp, t + h, k4);
    check_finite_dx(k4, t);
    Vec out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = x[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

int Trace::channel_index(std::string_view name) const {
    for (std::size_t i = 0; i < channel_names.size(); ++i)
        if (channel_names[i] == name) return static_cast<int>(i);
    return -1;
}

const std::vector<Vec>& Trace::channel(std::string_view name) const {
    const int i = channel_index(name);
    if (i < 0) throw UnknownChannel("unknown channel: " + std::string(name));
    return channels[static_cast<std::size_t>(i)];
}

Trace simulate(const RhsFn& rhs, const Vec& x0, double t0, double tf, double h,
               const StopCondition& stop, std::vector<Observer> observers,
               const SimulateOptions& opt) {
    if (!(tf > t0)) throw Error("simulate: tf must exceed t0");
    if (!(h > 0.0)) throw Error("simulate: h must be positive");

    Trace trace;
    trace.channel_names.reserve(observers.size());
    trace.channels.resize(observers.size());
    for (const auto& ob : observers) trace.channel_names.push_back(ob.name);

    auto record = [&](const Vec& x, double t) {
        trace.times.push_back(t);
        trace.states.push_back(x);
        for (std::size_t c = 0; c < observers.size(); ++c) {
            Vec v = observers[c].eval(x, t);
            if (!all_finite(v))
                throw NonFiniteDerivative("observer '" + observers[c].name +
                                          "' produced a non-finite value at t=" + std::to_string(t));
            trace.channels[c].push_back(std::move(v));
        }
    };
    auto check_cap = [&](const Vec& x, double t) {
        for (double v : x) {
            if (!std::isfinite(v) || std::fabs(v) > opt.divergence_cap)
                throw Diverged("state magnitude exceeded cap at t=" + std::to_string(t));
        }
    };

    check_cap(x0, t0);
    record(x0, t0);
    if (stop.fires(x0)) {
        trace.stopped = true;
        return trace;
    }

    const long steps = static_cast<long>(std::floor((tf - t0) / h + 1e-9));
    const int sub = std::max(1, opt.substeps);
    Vec x = x0;
    for (long k = 1; k <= steps; ++k) {
        const double t_prev = t0 + static_cast<double>(k - 1) * h;
        if (opt.on_step_begin) opt.on_step_begin(x, t_prev);
        const double hs = h / sub;
        for (int j = 0; j < sub; ++j) {
            x = rk4_step(rhs, x, t_prev + j * hs, hs);
            check_cap(x, t_prev + (j + 1) * hs);
        }
        const double t = t0 + static_cast<double>(k) * h;
        record(x, t);
        if (stop.fires(x)) {
            trace.stopped = true;
            break;
        }
    }
    return trace;
}

double signal_norm(const Trace& trace, std::string_view channel, Norm p, double ta, double tb) {
    const auto& ch = trace.channel(channel);
    if (!(ta <= tb)) throw EmptyWindow("signal_norm: empty window");
    const double tiny = 1e-12 * std::max(1.0, std::fabs(tb));
    std::size_t i0 = trace.times.size(), i1 = 0;
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
        if (trace.times[i] >= ta - tiny && trace.times[i] <= tb + tiny) {
            i0 = std::min(i0, i);
            i1 = std::max(i1, i);
        }
    }
    if (i0 > i1 || i0 == trace.times.size())
        throw EmptyWindow("signal_norm: window contains no samples");

    if (p == Norm::linf) {
        double m = 0.0;
        for (std::size_t i = i0; i <= i1; ++i) m = std::max(m, nrm2(ch[i]));
        return m;
    }
    double acc = 0.0;
    for (std::size_t i = i0; i + 1 <= i1; ++i) {
        const double dt = trace.times[i + 1] - trace.times[i];
        acc += 0.5 * dt * (dot(ch[i], ch[i]) + dot(ch[i + 1], ch[i + 1]));
    }
    return std::sqrt(acc);
}

Trace make_signal_trace(const std::string& name, const std::function<Vec(double)>& fn,
                        double t0, double tf, double h) {
    Trace trace;
    trace.channel_names.push_back(name);
    trace.channels.resize(1);
    const long steps = static_cast<long>(std::floor((tf - t0) / h + 1e-9));
    for (long k = 0; k <= steps; ++k) {
        const double t = t0 + static_cast<double>(k) * h;
        trace.times.push_back(t);
        Vec v = fn(t);
        trace.states.push_back(v);
        trace.channels[0].push_back(std::move(v));
    }
    return trace;
}

}  // namespace adaptsim
