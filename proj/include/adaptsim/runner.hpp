#pragma once

#include <optional>

#include "adaptsim/config.hpp"
#include "adaptsim/csv.hpp"
#include "adaptsim/excitation.hpp"
#include "adaptsim/scenarios.hpp"
#include "adaptsim/verify.hpp"

namespace adaptsim {

struct PreflightResult {
    MonotonicityReport monotonicity;
    GrowthBounds growth;
    double realizability_max = 0.0;
    double goal_gradient_err = 0.0;
    bool passed = false;
};

struct RunResult {
    std::string scenario;
    Trace trace;
    PreflightResult preflight;
    double terminal_theta_err = 0.0;
    double terminal_psi = 0.0;
    double ledger_max_increase = 0.0;
    double p1_worst_slack = 0.0;
    std::optional<double> braking;
    std::optional<PeScan> pe;
    std::optional<double> pe_delta;       // configured threshold, if any
    std::optional<PeVerdict> pe_verdict_result;
    std::optional<RateCertificate> certificate;
    CsvLayout layout;
};

/// Max over consecutive samples of the Gamma^{-1}-norm ledger increase
/// ||theta_hat(t_{k+1}) - theta||^2 - ||theta_hat(t_k) - theta||^2 (pairs
/// adjacent to event samples are skipped).
double parameter_norm_max_increase(const Trace& trace, const Mat& gamma_chol);

/// Worst prefix slack of the estimator mismatch-energy bound: min over samples of
/// bound(t) - ||mismatch||_{2,[anchor,t]}, where the anchor restarts at event
/// samples (road-profile switches).
double p1_worst_slack(const Trace& trace, const Mat& gamma_chol, double D, double D1);

BuiltScenario scenario_from_config(const Config& cfg);

/// Preflight -> run -> excitation analysis; writes trace.csv and summary.txt
/// into out_dir when non-empty. Throws PreflightFailed / Diverged / ...
RunResult run_scenario(const Config& cfg, const std::string& out_dir);

PreflightResult run_preflight(const BuiltScenario& sc);

struct SweepRow {
    double value = 0.0;
    double metric = 0.0;  // braking distance (wheel) or terminal ||theta_hat - theta||
    std::string error;    // empty on success
};

struct SweepResult {
    std::string axis;
    std::string metric_name;
    std::vector<SweepRow> rows;
};

/// One run per value of the config key `axis`; per-row failures are recorded
/// and the sweep continues. Rows execute in parallel.
SweepResult sweep(const Config& base, const std::string& axis, const std::vector<double>& values);

/// Canned preset: sweeping abs.x3_star over {0.10, 0.12, ..., 0.20}.
SweepResult sweep_preset_abs_fixed_slip(const Config& base);

}  // namespace adaptsim
