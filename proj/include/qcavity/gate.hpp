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

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qcavity/dynamics.hpp"
#include "qcavity/model.hpp"

namespace qcavity {

// Computational inputs in gate column order.
inline constexpr std::array<ProductLabel, 4> kComputationalBasis{
    ProductLabel{0, 0, 0}, ProductLabel{0, 1, 0}, ProductLabel{1, 0, 0}, ProductLabel{1, 1, 0}};

// diag(1, 1, -1, 1) on (|00>, |01>, |10>, |11>).
Matrix ideal_phase_gate();

// pi sqrt2 / Omega, the time at which |10> returns as -|10>.
double gate_time(double Omega);

// |Tr(ideal† extracted)|^2 / 16. Throws unless both are 4x4 and ideal is
// unitary.
double gate_fidelity(const Matrix& extracted, const Matrix& ideal);

// rho in the frame rotating with `bare`: e^{iH0 t} rho e^{-iH0 t}. `bare`
// must be diagonal.
Matrix to_interaction_picture(const Matrix& rho, const Operator& bare, double t);
Vector to_interaction_picture(const Vector& psi, const Operator& bare, double t);

struct GateOptions {
    StepControl ctrl;
    int fock_cutoff = 2;
    std::size_t workers = 1;
};

struct GateReport {
    Model model = Model::Reduced;
    SystemParams params;
    std::optional<int> fock_cutoff;
    double t_gate = 0.0;
    double dt = 0.0;
    std::size_t steps = 0;
    bool dissipative = false;
    // Column k is the computational-block image of input k, interaction
    // picture.
    Matrix extracted;
    // Population outside computational (x) vacuum, per input.
    std::array<double, 4> leakage{};
    double fidelity = 0.0;
    // arg of the |10> -> |10> amplitude.
    double phase_10 = 0.0;
};

// Runs the four computational inputs for t_gate and scores the block
// against ideal_phase_gate(). Closed models use one Schrodinger run per
// input. With jumps, amplitudes come from the no-jump propagator and
// leakage from the master equation. Integrator failures are rethrown as
// NumericalError naming the input.
GateReport extract_gate(Model model, const SystemParams& p, double t_gate,
                        const GateOptions& opt = {});

enum class ScanAxis { Delta, Kappa, Tau, Omega, FockCutoff };

std::string_view to_string(ScanAxis axis);
// "Delta", "kappa", "tau", "Omega", "fock_cutoff"
ScanAxis parse_scan_axis(std::string_view name);

struct ScanOptions {
    GateOptions gate;
    // When set, Omega = omega_ratio * g^2 / Delta at every point.
    std::optional<double> omega_ratio;
    // When unset, gate_time(Omega) per point.
    std::optional<double> t_gate;
};

struct ScanRow {
    double axis_value = 0.0;
    bool ok = false;
    std::string error;
    double fidelity = 0.0;
    std::array<double, 4> leakage{};
    double phase_10 = 0.0;
};

// Applies `value` to the `axis` field of `fixed`. Delta moves omega_c and
// keeps omega0, omega3. fock_cutoff leaves the params unchanged.
SystemParams apply_axis(const SystemParams& fixed, ScanAxis axis, double value,
                        const ScanOptions& opt);

// One gate extraction per value, rows in input order. Values must be
// positive and strictly increasing; fock_cutoff values must be integers
// >= 1. A point whose integration fails is returned with ok = false.
std::vector<ScanRow> regime_scan(ScanAxis axis, const std::vector<double>& values,
                                 const SystemParams& fixed, Model model,
                                 const ScanOptions& opt = {});

// axis_value,fidelity,leak00,leak01,leak10,leak11,phase_10,status
std::string scan_csv(const std::vector<ScanRow>& rows);

} // namespace qcavity
