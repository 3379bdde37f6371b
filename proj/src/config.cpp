#include "adaptsim/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace adaptsim {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_string(ss.str());
}

Config Config::from_string(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        cfg.set(section.empty() ? key : section + "." + key, value);
    }
    return cfg;
}

void Config::set(const std::string& key, const std::string& value) { kv_[key] = value; }

void Config::apply_override(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("--set expects key=value, got '" + assignment + "'");
    set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

bool Config::has(const std::string& key) const { return kv_.count(key) > 0; }

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    char* end = nullptr;
    const double v = std::strtod(it->second.c_str(), &end);
    if (end == it->second.c_str() || *end != '\0')
        throw ConfigError("key '" + key + "': expected a number, got '" + it->second + "'");
    return v;
}

int Config::get_int(const std::string& key, int fallback) const {
    const double v = get_double(key, static_cast<double>(fallback));
    return static_cast<int>(v);
}

void Config::validate(const std::vector<std::string>& allowed) const {
    for (const auto& [key, value] : kv_) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ConfigError("unknown config key '" + key + "'");
    }
}

const std::vector<std::string>& config_schema() {
    static const std::vector<std::string> keys = {
        "scenario.name",
        "run.h",
        "run.tf",
        "run.out",
        "plant.theta",
        "plant.theta0",
        "plant.theta1",
        "estimator.gamma",
        "estimator.theta_hat0",
        "estimator.theta_hat0_0",
        "estimator.theta_hat0_1",
        "spring.k0",
        "spring.lambda",
        "spring.x10",
        "spring.x20",
        "sine.lambda",
        "sine.x10",
        "sine.x20",
        "abs.x10",
        "abs.x3_star",
        "abs.ks",
        "abs.fn",
        "abs.delta1",
        "linear.x0",
        "target.omega",
        "disturbance.kind",
        "disturbance.a",
        "disturbance.b",
        "pe.window",
        "pe.delta",
    };
    return keys;
}

}  // namespace adaptsim
