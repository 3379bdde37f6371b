// Scenario runner: assumption preflight, closed-loop simulation, excitation
// analysis, CSV trace + text summary. Exit codes: 0 ok, 2 config error,
// 3 preflight failure, 4 divergence.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "adaptsim/report.hpp"
#include "adaptsim/runner.hpp"

namespace {

std::vector<double> parse_values(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (...) {
            throw adaptsim::ConfigError("--sweep: bad numeric value '" + item + "'");
        }
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"adaptive-control / parameter-estimation scenario runner"};
    app.set_help_flag("--help", "print usage");  // frees -h for the step flag

    std::string scenario, config_path, out_dir, sweep_arg;
    std::vector<std::string> overrides;
    double h = 0.0, tf = 0.0;

    app.add_option("--scenario", scenario, "built-in scenario: spring | sine | abs | linear");
    app.add_option("--config", config_path, "INI-style config file");
    app.add_option("--set", overrides, "override: section.key=value (repeatable)");
    app.add_option("--out", out_dir, "directory for trace.csv and summary.txt");
    app.add_option("--sweep", sweep_arg,
                   "axis=v1,v2,... (one run per value), or preset name 'abs-fixed-slip'");
    app.add_option("--h", h, "integration step override");
    app.add_option("--tf", tf, "horizon override");

    CLI11_PARSE(app, argc, argv);

    try {
        adaptsim::Config cfg = config_path.empty() ? adaptsim::Config()
                                                   : adaptsim::Config::from_file(config_path);
        if (!scenario.empty()) cfg.set("scenario.name", scenario);
        if (h > 0.0) cfg.set("run.h", std::to_string(h));
        if (tf > 0.0) cfg.set("run.tf", std::to_string(tf));
        for (const auto& kv : overrides) cfg.apply_override(kv);
        if (out_dir.empty()) out_dir = cfg.get_string("run.out", "");

        if (!sweep_arg.empty()) {
            adaptsim::SweepResult sw;
            const auto eq = sweep_arg.find('=');
            if (eq == std::string::npos) {
                if (sweep_arg != "abs-fixed-slip")
                    throw adaptsim::ConfigError("unknown sweep preset '" + sweep_arg + "'");
                sw = adaptsim::sweep_preset_abs_fixed_slip(cfg);
            } else {
                sw = adaptsim::sweep(cfg, sweep_arg.substr(0, eq),
                                     parse_values(sweep_arg.substr(eq + 1)));
            }
            const std::string table = adaptsim::render_sweep(sw);
            std::cout << table;
            if (!out_dir.empty()) {
                std::filesystem::create_directories(out_dir);
                adaptsim::write_text_file(out_dir + "/sweep.csv", table);
            }
            for (const auto& row : sw.rows)
                if (!row.error.empty()) return 1;
            return 0;
        }

        const adaptsim::RunResult result = adaptsim::run_scenario(cfg, out_dir);
        std::cout << adaptsim::render_summary(result, cfg);
        return 0;
    } catch (const adaptsim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const adaptsim::PreflightFailed& e) {
        std::cerr << "preflight failed: " << e.what() << "\n";
        return 3;
    } catch (const adaptsim::Diverged& e) {
        std::cerr << "diverged: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
