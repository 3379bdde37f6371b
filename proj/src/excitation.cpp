#include "adaptsim/excitation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace adaptsim {

namespace {

void add_outer(Mat& acc, const Vec& v, double w) {
    const int d = acc.rows();
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) acc(i, j) += w * v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(j)];
}

Vec lerp(const Vec& a, const Vec& b, double w) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + w * (b[i] - a[i]);
    return r;
}

}  // namespace

Mat gram_window(const Trace& trace, std::string_view channel, double ta, double tb) {
    const auto& ch = trace.channel(channel);
    if (trace.size() < 2) throw WindowOutOfRange("gram_window: trace too short");
    const double t0 = trace.times.front();
    const double t1 = trace.times.back();
    const double tiny = 1e-9 * std::max(1.0, std::fabs(t1));
    if (ta < t0 - tiny || tb > t1 + tiny || !(ta < tb))
        throw WindowOutOfRange("gram_window: window outside trace span");
    ta = std::max(ta, t0);
    tb = std::min(tb, t1);

    const int d = static_cast<int>(ch.front().size());
    Mat acc(d, d);
    for (std::size_t i = 0; i + 1 < trace.size(); ++i) {
        const double lo = trace.times[i];
        const double hi = trace.times[i + 1];
        const double a = std::max(lo, ta);
        const double b = std::min(hi, tb);
        if (!(a < b)) continue;
        const double span = hi - lo;
        const Vec va = (a == lo) ? ch[i] : lerp(ch[i], ch[i + 1], (a - lo) / span);
        const Vec vb = (b == hi) ? ch[i + 1] : lerp(ch[i], ch[i + 1], (b - lo) / span);
        add_outer(acc, va, 0.5 * (b - a));
        add_outer(acc, vb, 0.5 * (b - a));
    }
    acc.symmetrize();
    return acc;
}

PeVerdict pe_verdict(const Mat& gram, double delta) {
    const Vec ev = jacobi_eigenvalues(gram);
    return {ev.front() >= delta, ev.front()};
}

PeScan measure_pe(const Trace& trace, std::string_view channel, double L, Exec exec) {
    const auto& ch = trace.channel(channel);
    const std::size_t n = trace.size();
    PeScan scan;
    scan.window = L;
    scan.per_sample.assign(n, std::numeric_limits<double>::quiet_NaN());
    if (n == 0) return scan;
    const int d = static_cast<int>(ch.front().size());

    for (std::size_t i = 0; i < n; ++i) scan.alpha_sup = std::max(scan.alpha_sup, nrm2(ch[i]));

    if (n < 2) return scan;

    // cumulative trapezoid of the outer-product integrand, then window sums
    // by subtraction (grid-snapped windows)
    std::vector<Mat> prefix(n, Mat(d, d));
    for (std::size_t i = 1; i < n; ++i) {
        Mat m = prefix[i - 1];
        const double dt = trace.times[i] - trace.times[i - 1];
        add_outer(m, ch[i - 1], 0.5 * dt);
        add_outer(m, ch[i], 0.5 * dt);
        prefix[i] = std::move(m);
    }

    const double tiny = 1e-9 * std::max(1.0, std::fabs(trace.times.back()));
    std::vector<std::int64_t> start(n, -1);
    {
        std::size_t j = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double lo = trace.times[i] - L;
            while (j + 1 < n && trace.times[j + 1] <= lo + tiny) ++j;
            if (trace.times[j] <= lo + tiny) start[i] = static_cast<std::int64_t>(j);
        }
    }

    parallel_for(static_cast<std::int64_t>(n), exec, [&](std::int64_t ii) {
        const auto i = static_cast<std::size_t>(ii);
        if (start[i] < 0 || static_cast<std::size_t>(start[i]) >= i) return;
        Mat g = prefix[i] - prefix[static_cast<std::size_t>(start[i])];
        g.symmetrize();
        scan.per_sample[i] = jacobi_eigenvalues(g).front();
    });

    double inf = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isnan(scan.per_sample[i])) {
            inf = std::min(inf, scan.per_sample[i]);
            ++scan.full_windows;
        }
    }
    scan.delta_inf = scan.full_windows > 0 ? inf : 0.0;
    return scan;
}

RateCertificate convergence_rate(double delta, double L, double D, double D1, const Mat& Gamma,
                                 double alpha_inf) {
    const Vec ev = jacobi_eigenvalues(Gamma);
    const double lmin = ev.front();
    const double lmax = ev.back();
    RateCertificate cert;
    cert.delta = delta;
    cert.L = L;
    cert.D = D;
    cert.D1 = D1;
    cert.alpha_inf = alpha_inf;
    cert.gamma_min = lmin;
    cert.gamma_max = lmax;
    const double a4 = alpha_inf * alpha_inf * alpha_inf * alpha_inf;
    cert.rho = delta * D1 * lmin / (2.0 * L * (1.0 + lmax * lmax * L * L * D * D * a4));
    cert.D_Gamma = std::sqrt(lmax / lmin);
    return cert;
}

std::vector<EnvelopePoint> nonlinear_pe_probe(
    const std::function<double(const Vec&, const Vec&, double)>& f, const Trace& trace,
    const std::vector<std::pair<Vec, Vec>>& theta_pairs, double L, int bins, Exec exec) {
    const std::size_t n = trace.size();
    if (n < 2 || trace.times.back() - trace.times.front() < L)
        throw InsufficientSpan("nonlinear_pe_probe: trace span shorter than window");
    if (theta_pairs.empty()) throw InsufficientSpan("nonlinear_pe_probe: empty pair grid");

    const double h = trace.step();
    const std::size_t wlen = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(L / h + 1e-9)));
    const std::size_t stride = std::max<std::size_t>(1, wlen / 4);

    std::vector<std::size_t> starts;
    for (std::size_t s = 0; s + wlen < n; s += stride) starts.push_back(s);
    if (starts.empty()) starts.push_back(0);

    std::vector<double> value(theta_pairs.size());
    std::vector<double> dist(theta_pairs.size());
    parallel_for(static_cast<std::int64_t>(theta_pairs.size()), exec, [&](std::int64_t pi) {
        const auto& [th1, th2] = theta_pairs[static_cast<std::size_t>(pi)];
        double worst_window = std::numeric_limits<double>::infinity();
        for (const std::size_t s : starts) {
            double best = 0.0;
            const std::size_t e = std::min(n - 1, s + wlen);
            for (std::size_t i = s; i <= e; ++i) {
                const double t = trace.times[i];
                best = std::max(best, std::fabs(f(trace.states[i], th1, t) - f(trace.states[i], th2, t)));
            }
            worst_window = std::min(worst_window, best);
        }
        value[static_cast<std::size_t>(pi)] = worst_window;
        dist[static_cast<std::size_t>(pi)] = nrm2(th1 - th2);
    });

    double dmax = 0.0;
    for (double v : dist) dmax = std::max(dmax, v);
    if (dmax == 0.0) dmax = 1.0;

    std::vector<EnvelopePoint> env(static_cast<std::size_t>(bins));
    for (int b = 0; b < bins; ++b) {
        env[static_cast<std::size_t>(b)].dist = (b + 0.5) * dmax / bins;
        env[static_cast<std::size_t>(b)].raw = std::numeric_limits<double>::infinity();
    }
    for (std::size_t p = 0; p < theta_pairs.size(); ++p) {
        int b = static_cast<int>(dist[p] / dmax * bins);
        b = std::min(b, bins - 1);
        auto& e = env[static_cast<std::size_t>(b)];
        e.raw = std::min(e.raw, value[p]);
        ++e.count;
    }
    env.erase(std::remove_if(env.begin(), env.end(),
                             [](const EnvelopePoint& e) { return e.count == 0; }),
              env.end());

    // class-K shape: largest non-decreasing minorant (suffix minimum)
    double running = std::numeric_limits<double>::infinity();
    for (auto it = env.rbegin(); it != env.rend(); ++it) {
        running = std::min(running, it->raw);
        it->regressed = running;
    }
    return env;
}

}  // namespace adaptsim
