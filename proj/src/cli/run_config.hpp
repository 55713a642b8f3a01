// run_config.hpp — resolved, serializable run configuration.
//
// A raw configuration (JSON file merged with command-line flags) is read
// through ConfigReader, which applies defaults, validates every value and
// records exactly what was used. The recorded object is what artifacts embed
// and what a replay consumes.

#pragma once

#include <json.hpp>

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace mipt::cli {

using json = nlohmann::json;

/// "a:b:step" (inclusive), "x,y,z", a single number, or a JSON array.
std::vector<double> parse_real_list(const json& value, std::string_view key);
std::vector<int> parse_int_list(const json& value, std::string_view key);

/// Interprets a command-line token: numbers become JSON numbers, anything
/// else stays a string (ranges and lists are expanded later).
json token_to_json(const std::string& token);

class ConfigReader {
public:
    explicit ConfigReader(json raw);

    double real(const std::string& key, double fallback);
    double real(const std::string& key); // required
    int integer(const std::string& key, int fallback);
    int integer(const std::string& key); // required
    long long integer64(const std::string& key, long long fallback);
    std::string text(const std::string& key, const std::string& fallback);
    bool flag(const std::string& key);
    std::vector<double> reals(const std::string& key, const std::vector<double>& fallback);
    std::vector<double> reals(const std::string& key); // required
    std::vector<int> integers(const std::string& key, const std::vector<int>& fallback);
    std::vector<int> integers(const std::string& key); // required
    bool has(const std::string& key) const;

    /// Stores an already-resolved value (for derived settings).
    void set(const std::string& key, json value);

    /// Throws ConfigError naming any key in the raw config that was never read.
    void finish() const;

    const json& resolved() const noexcept { return resolved_; }

private:
    const json* lookup(const std::string& key);

    json raw_;
    json resolved_;
    std::set<std::string> used_;
};

} // namespace mipt::cli
