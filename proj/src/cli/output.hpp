// output.hpp — tables and their CSV / JSON artifacts.
//
// CSV layout:
//     # schema=1
//     # digest=fnv1a64:<16 hex digits> config=<compact JSON>
//     col1,col2,...
//     rows...
// Numbers use the shortest decimal form that round-trips.

#pragma once

#include "cli/run_config.hpp"

#include <string>
#include <variant>
#include <vector>

namespace mipt::cli {

inline constexpr int schema_version = 1;

// An empty string marks a value that does not exist for that row.
using Cell = std::variant<double, long long, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row);
};

std::string format_number(double v);
std::string fnv1a64_hex(std::string_view bytes);

/// The config as embedded in artifacts (compact, keys sorted).
std::string canonical_config(const json& config);
std::string config_digest(const json& config);

std::string render_csv(const Table& table, const json& config);
std::string render_json(const Table& table, const json& config);
std::string render(const Table& table, const json& config, const std::string& format);

/// Writes via a temporary file in the same directory and renames it into
/// place; "-" writes to stdout.
void write_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

/// Extracts the embedded config from a CSV or JSON artifact and checks the
/// digest (ConfigError on any mismatch).
json artifact_config(const std::string& content);

} // namespace mipt::cli
