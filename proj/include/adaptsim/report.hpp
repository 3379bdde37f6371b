#pragma once

#include <string>

#include "adaptsim/runner.hpp"

namespace adaptsim {

/// Plain-text run summary (deterministic: no timestamps, fixed formatting).
std::string render_summary(const RunResult& result, const Config& cfg);

std::string render_sweep(const SweepResult& sweep);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace adaptsim
