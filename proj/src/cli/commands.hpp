// commands.hpp — experiment commands of the mipt-lab runner.

#pragma once

#include "cli/output.hpp"
#include "cli/run_config.hpp"

#include <string>
#include <vector>

namespace mipt::cli {

enum exit_code : int { exit_ok = 0, exit_config = 2, exit_numerical = 3 };

struct OptionSpec {
    std::string flag; // long flag without dashes, e.g. "t-max"
    std::string key;  // configuration key, e.g. "t_max"
    std::string help;
    bool is_switch{false};
};

struct CommandInfo {
    std::string name;
    std::string help;
    std::vector<OptionSpec> options;
};

/// Every experiment command with its options ("format" is shared by all).
const std::vector<CommandInfo>& command_table();

/// Runs `command` on a raw configuration; returns the table and leaves the
/// fully resolved configuration (including "command") in `resolved`.
Table run_command(const std::string& command, const json& raw, int jobs, json& resolved);

/// Runs and renders; the output format is read from the config.
std::string run_to_text(const json& raw_with_command, int jobs);

/// Worker count: explicit value if > 0, else MIPT_LAB_JOBS, else 1.
int resolve_jobs(int requested);

} // namespace mipt::cli
