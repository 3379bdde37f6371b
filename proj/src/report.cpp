#include "adaptsim/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace adaptsim {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace

std::string render_summary(const RunResult& r, const Config& cfg) {
    std::ostringstream os;
    os << "scenario: " << r.scenario << "\n";
    os << "\n[config]\n";
    for (const auto& [key, value] : cfg.entries()) os << key << " = " << value << "\n";

    os << "\n[preflight]\n";
    os << "monotonicity: " << (r.preflight.monotonicity.violations == 0 ? "pass" : "FAIL") << " ("
       << r.preflight.monotonicity.tuples << " tuples, "
       << r.preflight.monotonicity.violations << " violations, margin "
       << num(r.preflight.monotonicity.margin) << ")\n";
    os << "growth bounds: D_est = " << num(r.preflight.growth.D_est)
       << ", D1_est = " << num(r.preflight.growth.D1_est) << " ("
       << r.preflight.growth.used << " tuples)\n";
    os << "realizability residual: " << num(r.preflight.realizability_max) << "\n";
    os << "goal gradient consistency: " << num(r.preflight.goal_gradient_err) << "\n";
    os << "verdict: " << (r.preflight.passed ? "pass" : "FAIL") << "\n";

    os << "\n[run]\n";
    os << "samples: " << r.trace.size() << "\n";
    os << "final time: " << num(r.trace.times.back()) << "\n";
    os << "stopped: " << (r.trace.stopped ? "yes" : "no") << "\n";
    os << "terminal |psi|: " << num(std::fabs(r.terminal_psi)) << "\n";
    os << "terminal |theta_hat - theta|: " << num(r.terminal_theta_err) << "\n";
    os << "parameter-norm ledger max step increase: " << num(r.ledger_max_increase) << "\n";
    os << "mismatch L2 bound worst slack: " << num(r.p1_worst_slack) << "\n";
    if (r.braking) os << "braking distance (m): " << num(*r.braking) << "\n";

    if (r.pe) {
        os << "\n[excitation]\n";
        os << "window L: " << num(r.pe->window) << "\n";
        os << "delta (inf lambda_min over windows): " << num(r.pe->delta_inf) << "\n";
        os << "alpha sup: " << num(r.pe->alpha_sup) << "\n";
        os << "full windows: " << r.pe->full_windows << "\n";
        if (r.pe_delta)
            os << "pe verdict at delta = " << num(*r.pe_delta) << ": "
               << (r.pe_verdict_result->satisfied ? "satisfied" : "violated") << "\n";
        if (r.certificate) {
            os << "rate rho: " << num(r.certificate->rho) << "\n";
            os << "D_Gamma: " << num(r.certificate->D_Gamma) << "\n";
            os << "alpha_inf used: " << num(r.certificate->alpha_inf) << "\n";
        }
    }
    return os.str();
}

std::string render_sweep(const SweepResult& s) {
    std::ostringstream os;
    os << "axis: " << s.axis << "\n";
    os << "value," << s.metric_name << ",error\n";
    for (const auto& row : s.rows) {
        os << num(row.value) << ",";
        if (row.error.empty())
            os << num(row.metric) << ",";
        else
            os << ",\"" << row.error << "\"";
        os << "\n";
    }
    return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw IoError("cannot open for writing: " + path);
    std::fwrite(text.data(), 1, text.size(), f);
    if (std::fclose(f) != 0) throw IoError("write failed: " + path);
}

}  // namespace adaptsim
