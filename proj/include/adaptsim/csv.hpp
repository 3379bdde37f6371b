#pragma once

#include <string>

#include "adaptsim/integrate.hpp"

namespace adaptsim {

/// Mapping from recorded (augmented) states to the exported plant state
/// columns x1_0.., x2_0...
struct CsvLayout {
    int q = 0;  // uncertainty-independent dim
    int n = 0;  // exported plant state dim (leading entries of each state)
};

/// Writes the trace in the fixed column schema
///   t, x1_0.., x2_0.., psi, u, theta_hat_0.., V, eps, pe_lambda_min
/// with >= 15 significant digits; pe_lambda_min is blank before the first
/// full window (or everywhere when no PE scan was attached).
void export_csv(const Trace& trace, const std::string& path, const CsvLayout& layout,
                const std::vector<double>* pe_lambda_min = nullptr);

}  // namespace adaptsim
