// mipt-lab — command-line runner for the purity-transition experiments.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include "cli/commands.hpp"
#include "cli/output.hpp"
#include "mipt/errors.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <memory>
#include <string>

using mipt::cli::json;

namespace {

struct SubcommandState {
    std::string name;
    std::map<std::string, std::string> values; // key -> raw token
    std::map<std::string, bool> switches;
    std::string output = "-";
    std::string format;
    std::string config_path;
    int jobs = 0;
    CLI::App* app = nullptr;
    std::vector<std::pair<std::string, CLI::Option*>> options;
};

json assemble_config(const SubcommandState& st) {
    json raw = json::object();
    if (!st.config_path.empty()) {
        try {
            raw = json::parse(mipt::cli::read_file(st.config_path));
        } catch (const json::exception& e) {
            throw mipt::ConfigError("config file '" + st.config_path + "' is not valid JSON: " + e.what());
        }
        if (!raw.is_object()) throw mipt::ConfigError("config file must contain a JSON object");
        if (raw.contains("command") && raw["command"] != st.name) {
            throw mipt::ConfigError("config file is for command '" + raw["command"].get<std::string>() + "'");
        }
    }
    for (const auto& [key, opt] : st.options) {
        if (opt->count() == 0) continue;
        const auto sw = st.switches.find(key);
        if (sw != st.switches.end()) {
            raw[key] = sw->second;
        } else {
            raw[key] = mipt::cli::token_to_json(st.values.at(key));
        }
    }
    if (!st.format.empty()) raw["format"] = st.format;
    raw["command"] = st.name;
    return raw;
}

int report(const std::string& kind, const std::exception& e, int code) {
    std::cerr << "mipt-lab: " << kind << ": " << e.what() << '\n';
    return code;
}

template <class F>
int guarded(F&& body) {
    using namespace mipt;
    using namespace mipt::cli;
    try {
        return body();
    } catch (const NumericalFailure& e) {
        return report("numerical failure", e, exit_numerical);
    } catch (const IntegrationFailure& e) {
        return report("integration failure at t = " + std::to_string(e.time()), e, exit_numerical);
    } catch (const DivergedError& e) {
        return report("numerical failure", e, exit_numerical);
    } catch (const std::invalid_argument& e) {
        return report("configuration error", e, exit_config);
    } catch (const std::domain_error& e) {
        return report("configuration error", e, exit_config);
    } catch (const std::exception& e) {
        return report("numerical failure", e, exit_numerical);
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"mipt-lab: purity dynamics of the all-to-all Brownian qudit circuit with measurements"};
    app.require_subcommand(1);

    std::vector<std::unique_ptr<SubcommandState>> states;
    for (const auto& info : mipt::cli::command_table()) {
        auto st = std::make_unique<SubcommandState>();
        st->name = info.name;
        st->app = app.add_subcommand(info.name, info.help);
        for (const auto& o : info.options) {
            CLI::Option* opt;
            if (o.is_switch) {
                opt = st->app->add_flag("--" + o.flag, st->switches[o.key], o.help);
            } else {
                opt = st->app->add_option("--" + o.flag, st->values[o.key], o.help);
            }
            st->options.emplace_back(o.key, opt);
        }
        st->app->add_option("-o,--output", st->output, "output file ('-' for stdout)");
        st->app->add_option("--format", st->format, "csv (default) or json");
        st->app->add_option("--config", st->config_path, "JSON config file; flags override its entries");
        st->app->add_option("--jobs", st->jobs, "worker threads (default: MIPT_LAB_JOBS or 1)");
        states.push_back(std::move(st));
    }

    std::string artifact;
    std::string rerun_output;
    bool check = false;
    int rerun_jobs = 0;
    CLI::App* rerun = app.add_subcommand("rerun", "re-run the config embedded in an artifact");
    rerun->add_option("artifact", artifact, "CSV or JSON artifact")->required();
    rerun->add_option("-o,--output", rerun_output, "write the regenerated artifact here");
    rerun->add_flag("--check", check, "exit 0 only if the regenerated output is byte-identical");
    rerun->add_option("--jobs", rerun_jobs, "worker threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : mipt::cli::exit_config;
    }

    if (rerun->parsed()) {
        return guarded([&] {
            const std::string original = mipt::cli::read_file(artifact);
            const json config = mipt::cli::artifact_config(original);
            const std::string text = mipt::cli::run_to_text(config, mipt::cli::resolve_jobs(rerun_jobs));
            if (!rerun_output.empty()) mipt::cli::write_atomic(rerun_output, text);
            if (check) {
                if (text != original) {
                    std::cerr << "mipt-lab: regenerated output differs from " << artifact << '\n';
                    return static_cast<int>(mipt::cli::exit_numerical);
                }
                std::cerr << "mipt-lab: " << artifact << " reproduced byte-for-byte\n";
            } else if (rerun_output.empty()) {
                mipt::cli::write_atomic("-", text);
            }
            return static_cast<int>(mipt::cli::exit_ok);
        });
    }

    for (const auto& st : states) {
        if (!st->app->parsed()) continue;
        return guarded([&] {
            const json raw = assemble_config(*st);
            const std::string text = mipt::cli::run_to_text(raw, mipt::cli::resolve_jobs(st->jobs));
            mipt::cli::write_atomic(st->output, text);
            return static_cast<int>(mipt::cli::exit_ok);
        });
    }
    return mipt::cli::exit_config;
}
