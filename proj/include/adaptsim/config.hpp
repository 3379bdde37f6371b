#pragma once

#include <map>
#include <string>
#include <vector>

#include "adaptsim/errors.hpp"

namespace adaptsim {

/// Flat key-value configuration parsed from INI-style text: [section]
/// headers, key = value lines, '#'/';' comments. Keys are addressed as
/// "section.key". Unknown keys are rejected against the scenario schema.
class Config {
public:
    static Config from_file(const std::string& path);
    static Config from_string(const std::string& text);

    void set(const std::string& key, const std::string& value);
    /// Applies a --set override "section.key=value".
    void apply_override(const std::string& assignment);

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;

    /// Throws ConfigError naming the first key outside the schema.
    void validate(const std::vector<std::string>& allowed) const;

    const std::map<std::string, std::string>& entries() const { return kv_; }

private:
    std::map<std::string, std::string> kv_;
};

/// Keys understood by the built-in scenarios (also the --set surface).
const std::vector<std::string>& config_schema();

}  // namespace adaptsim
