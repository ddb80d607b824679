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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "qcavity/gate.hpp"
#include "qcavity/geometric.hpp"
#include "qcavity/model.hpp"

namespace qcavity {

inline constexpr const char* kToolVersion = "0.1.0";

enum class Task { Dump, Simulate, Gate, Scan, Berry };

std::string_view to_string(Task task);
// "dump", "simulate", "gate", "scan", "berry"
Task parse_task(std::string_view name);

struct IntegratorConfig {
    double dt = 0.0; // 0 selects the engine default
    double trace_tolerance = 1e-6;
    bool richardson_check = false;
    bool operator==(const IntegratorConfig&) const = default;
};

struct InitialConfig {
    // "" for the basis label below; "computational" for the uniform
    // superposition of |00>, |01>, |10>, |11>; "phi+" or "phi-".
    std::string preset;
    Level ion1 = 1;
    Level ion2 = 0;
    int photons = 0;
    bool operator==(const InitialConfig&) const = default;
};

struct SimulateConfig {
    double t_final = 0.0;
    std::size_t samples = 100;
    bool operator==(const SimulateConfig&) const = default;
};

struct GateConfig {
    double t_gate = 0.0;
    bool operator==(const GateConfig&) const = default;
};

struct ScanConfig {
    ScanAxis axis = ScanAxis::Delta;
    std::vector<double> values;
    std::optional<double> omega_ratio;
    std::optional<double> t_gate;
    bool operator==(const ScanConfig&) const = default;
};

struct LoopConfig {
    double theta0 = 2.0943951023931957; // 2 pi / 3
    double windings = 1.0;
    double T = 2000.0;
    double ramp_fraction = 0.1;
    double Omega_bar = 1.0;
    bool operator==(const LoopConfig&) const = default;
};

struct ScenarioConfig {
    Model model = Model::Reduced;
    Task task = Task::Gate;
    SystemParams params;
    int fock_cutoff = 2;
    InitialConfig initial;
    SimulateConfig simulate;
    GateConfig gate;
    ScanConfig scan;
    LoopConfig loop;
    IntegratorConfig integrator;
    std::string output = "qcavity-out";
    std::int64_t seed = 0;
    bool operator==(const ScenarioConfig&) const = default;
};

// Strict parse: unknown keys, wrong types, out-of-range values and blocks
// that do not belong to the task all throw ConfigError naming the key path.
// Defaults are filled in (gate.t_gate = pi sqrt2 / Omega when absent).
ScenarioConfig parse_config(std::string_view text);

// Canonical JSON of a parsed config: every field explicit, params in the
// omega form, 17 significant digits. Parsing it returns an equal config.
// Without `include_output` the output directory is left out; that form is
// what run_scenario records and hashes.
std::string canonical_config(const ScenarioConfig& config, bool include_output = true);

// Human-readable schema: every key with its type, default and range.
std::string config_reference();

// JSON text with every double printed at 17 significant digits; non-finite
// values become null.
std::string gate_report_json(const GateReport& report);
std::string berry_report_json(const BerryReport& report);

std::string sha256_hex(std::string_view data);

struct RunOutput {
    std::filesystem::path directory;
    std::vector<std::string> files; // manifest.json last
    std::string summary;
};

// Dispatches the task, writes its files plus config.json and manifest.json
// into `out_dir` (created if needed). Each file goes through a temporary
// name and a rename. Worker count never changes file contents.
RunOutput run_scenario(const ScenarioConfig& config, const std::filesystem::path& out_dir,
                       std::size_t workers = 1);

// Exit codes of the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNumerical = 2;
inline constexpr int kExitIo = 3;

} // namespace qcavity
