#pragma once

#include <utility>

#include "adaptsim/integrate.hpp"
#include "adaptsim/linalg.hpp"
#include "adaptsim/parallel.hpp"

namespace adaptsim {

/// Trapezoid quadrature of int alpha alpha' dtau over [ta, tb]. Window edges
/// may fall between samples; the partial end intervals use linearly
/// interpolated channel values. Result is symmetrized.
Mat gram_window(const Trace& trace, std::string_view channel, double ta, double tb);

struct PeVerdict {
    bool satisfied = false;
    double lambda_min = 0.0;
};

/// satisfied iff lambda_min(gram) >= delta (boundary inclusive).
PeVerdict pe_verdict(const Mat& gram, double delta);

/// Sliding-window monitor over a whole trace: lambda_min of the Gram integral
/// for every sample whose trailing window [t-L, t] is inside the trace
/// (grid-snapped, via cumulative sums), the infimum over those windows, and
/// the sup of ||alpha|| over the trace.
struct PeScan {
    double window = 0.0;
    double delta_inf = 0.0;   // infimum of lambda_min over full windows
    double alpha_sup = 0.0;   // max ||alpha(t)|| over all samples
    std::size_t full_windows = 0;
    std::vector<double> per_sample;  // NaN before the first full window
};

PeScan measure_pe(const Trace& trace, std::string_view channel, double L,
                  Exec exec = Exec::parallel);

struct RateCertificate {
    double rho = 0.0;
    double D_Gamma = 1.0;
    double alpha_inf = 0.0;
    double delta = 0.0, L = 0.0, D = 0.0, D1 = 0.0;
    double gamma_min = 0.0, gamma_max = 0.0;
};

/// rho = delta D1 lmin(Gamma) / (2L (1 + lmax(Gamma)^2 L^2 D^2 alpha_inf^4)),
/// D_Gamma = sqrt(lmax/lmin).
RateCertificate convergence_rate(double delta, double L, double D, double D1, const Mat& Gamma,
                                 double alpha_inf);

struct EnvelopePoint {
    double dist = 0.0;       // bin center ||theta1 - theta2||
    double raw = 0.0;        // binned lower envelope
    double regressed = 0.0;  // after monotone (suffix-min) regression
    std::size_t count = 0;
};

/// Empirical witness for the class-K bound of the nonlinear PE condition:
/// for each parameter pair, max over t' in each length-L window of
/// |f(x(t'),th1,t') - f(x(t'),th2,t')|, then the min over windows; binned by
/// parameter distance. f receives the recorded state vector.
std::vector<EnvelopePoint> nonlinear_pe_probe(
    const std::function<double(const Vec& state, const Vec& theta, double t)>& f,
    const Trace& trace, const std::vector<std::pair<Vec, Vec>>& theta_pairs, double L,
    int bins = 16, Exec exec = Exec::parallel);

}  // namespace adaptsim
