// Copyright 2026 The qcavity Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// qcavity <task> --config <path> [--out <dir>] [--workers N] [--dt X] [--quiet]
// qcavity config-reference

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "qcavity/errors.hpp"
#include "qcavity/scenario.hpp"

using namespace qcavity;

namespace {

struct RunArgs {
    std::string config;
    std::string out;
    std::size_t workers = 1;
    double dt = 0.0;
    bool dt_set = false;
    bool quiet = false;
};

std::string read_file(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw IoError("cannot read config file " + path);
    }
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

int run_task(Task task, const RunArgs& args)
{
    try {
        ScenarioConfig config = parse_config(read_file(args.config));
        if (config.task != task) {
            throw ConfigError("task", "config declares '" + std::string(to_string(config.task))
                                          + "' but the command line asked for '"
                                          + std::string(to_string(task)) + "'");
        }
        if (args.dt_set) {
            if (!(args.dt > 0.0)) {
                throw ConfigError("--dt", "must be > 0");
            }
            config.integrator.dt = args.dt;
        }
        if (!args.out.empty()) {
            config.output = args.out;
        }
        const RunOutput out = run_scenario(config, config.output, std::max<std::size_t>(1, args.workers));
        if (!args.quiet) {
            std::cout << out.summary << "\n";
            std::cout << "wrote " << out.files.size() << " file(s) to " << out.directory.string() << "\n";
        }
        return kExitOk;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const InvalidArgument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure at t = " << e.time() << ": " << e.what() << "\n";
        return kExitNumerical;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kExitIo;
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"qcavity: two-ion cavity phase gate and geometric phase simulator"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    RunArgs args;
    Task chosen = Task::Gate;
    for (Task task : {Task::Dump, Task::Simulate, Task::Gate, Task::Scan, Task::Berry}) {
        CLI::App* sub = app.add_subcommand(std::string(to_string(task)),
                                           "run a " + std::string(to_string(task)) + " scenario");
        sub->add_option("--config", args.config, "scenario JSON file")->required();
        sub->add_option("--out", args.out, "output directory (overrides the config)");
        sub->add_option("--workers", args.workers, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option_function<double>(
            "--dt", [&args](double v) { args.dt = v; args.dt_set = true; }, "fixed time step");
        sub->add_flag("--quiet", args.quiet, "no summary on stdout");
        sub->callback([&chosen, task] { chosen = task; });
    }
    bool reference = false;
    app.add_subcommand("config-reference", "print the configuration schema")
        ->callback([&reference] { reference = true; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }
    if (reference) {
        std::cout << config_reference();
        return kExitOk;
    }
    return run_task(chosen, args);
}
