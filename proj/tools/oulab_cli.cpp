// Command-line front end: config file plus flag overrides, then one run.

#include "oulab/config.hpp"
#include "oulab/runner.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <utility>
#include <vector>

int main(int argc, char** argv)
{
    CLI::App app{"OU exponential-moment and concentration checks"};
    app.set_help_flag("--help", "Print this help message and exit");
    app.set_help_all_flag("--help-all");

    std::string command;
    std::string config_path;
    app.add_option("command", command,
                   "constants | verify-prop21 | verify-thm23 | concentration | moments | decomposition");
    app.add_option("--config", config_path, "key = value file applied before flag overrides");

    // every remaining flag maps onto one config key
    std::vector<std::pair<std::string, std::string>> keys = {
        {"seed", "seed (mandatory)"},
        {"n", "number of paths"},
        {"M", "grid steps"},
        {"workers", "worker threads (does not change results)"},
        {"spectrum", "'list:a,b,...' or 'n^p,N=k'"},
        {"N", "truncation (0 keeps the listed spectrum)"},
        {"b", "integrand: weighted:<sin|tanh|clip|sign|step>, const, zero, time:cos"},
        {"h", "shift, e.g. e1:sin_pi_t or e1:const*0.5+e2:t"},
        {"h2", "second shift for concentration (zero allowed)"},
        {"lambda", "OU rate for one-dimensional checks"},
        {"lambda-grid", "log:a:b:n, lin:a:b:n or list:..."},
        {"ell", "time scale of the drift ell*A, in (0,1]"},
        {"r", "window start"},
        {"u", "window end"},
        {"start", "Z_r for window checks (comma list)"},
        {"eta", "tail levels (comma list)"},
        {"p", "moment orders (comma list)"},
        {"x", "first constant shift (comma list)"},
        {"y", "second constant shift (comma list)"},
        {"grids", "grid sizes for the decomposition (each divides the last)"},
        {"format", "csv or json"},
        {"output", "result file (stdout when empty)"},
        {"dump", "CSV of sampled paths (path_id,component,t,value)"},
    };
    std::vector<std::string> values(keys.size());
    for (std::size_t i = 0; i < keys.size(); ++i) {
        app.add_option("--" + keys[i].first, values[i], keys[i].second);
    }

    try {
        app.parse(argc, argv);
    } catch (CLI::CallForHelp const& e) {
        return app.exit(e);
    } catch (CLI::CallForAllHelp const& e) {
        return app.exit(e);
    } catch (CLI::ParseError const& e) {
        app.exit(e);
        return oulab::kExitInvalid;
    }

    oulab::RunConfig config;
    try {
        if (!config_path.empty()) {
            std::ifstream file(config_path);
            if (!file) {
                throw oulab::ConfigError("cannot read config file '" + config_path + "'");
            }
            std::stringstream text;
            text << file.rdbuf();
            config = oulab::parse_config(text.str());
        }
        if (!command.empty()) {
            config.command = oulab::parse_command(command);
        }
        for (std::size_t i = 0; i < keys.size(); ++i) {
            if (app.count("--" + keys[i].first) > 0) {
                oulab::apply_setting(config, keys[i].first, values[i]);
            }
        }
    } catch (std::exception const& e) {
        std::cerr << "invalid config: " << e.what() << "\n";
        return oulab::kExitInvalid;
    }

    auto const result = oulab::run(config);
    if (result.exit_code == oulab::kExitInvalid) {
        std::cerr << result.diagnostics << "\n";
        return oulab::kExitInvalid;
    }
    try {
        oulab::write_artifacts(config, result);
    } catch (std::exception const& e) {
        std::cerr << e.what() << "\n";
        return oulab::kExitInvalid;
    }
    for (auto const& line : result.verdicts) {
        std::cerr << line << "\n";
    }
    return result.exit_code;
}
