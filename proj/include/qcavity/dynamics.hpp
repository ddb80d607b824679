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

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qcavity/hilbert.hpp"
#include "qcavity/model.hpp"

namespace qcavity {

struct StepControl {
    // 0 selects default_step() for the generator.
    double dt = 0.0;
    std::size_t record_every = 1;
    // Max |Tr rho - 1| (or | |psi| - 1 |) before the run aborts.
    double trace_tolerance = 1e-6;
    // Re-run at dt/2 and record the largest change of any sampled state.
    bool richardson_check = false;
};

struct TrajectoryMeta {
    std::string generator;
    double dt = 0.0;
    std::size_t steps = 0;
    std::size_t record_every = 1;
    double max_trace_drift = 0.0;
    // Largest max|rho - rho†| seen after a step, before re-Hermitization.
    double max_hermiticity_drift = 0.0;
    // Smallest eigenvalue over sampled density-matrix frames.
    double min_eigenvalue = 1.0;
    std::optional<double> richardson_delta;
};

template <class State>
struct Trajectory {
    std::vector<double> times;
    std::vector<State> states;
    TrajectoryMeta meta;
};

using MasterTrajectory = Trajectory<DensityMatrix>;
using PureTrajectory = Trajectory<StateVector>;

//
// A Hamiltonian H(t) plus a fixed jump set. Constant generators are
// precompiled into sparse kernels; driven ones are sampled at every RK4
// substage time (t, t + dt/2, t + dt).
//
class Generator {
  public:
    static Generator constant(Operator hamiltonian, JumpSet jumps = {});
    // `scale` bounds ||H(t)|| over the run; it feeds default_step().
    static Generator driven(std::size_t dim, std::function<Matrix(double)> hamiltonian,
                            JumpSet jumps, std::string label, double scale);

    std::size_t dim() const { return dim_; }
    bool time_dependent() const { return bool(driven_); }
    Matrix hamiltonian(double t) const;
    const JumpSet& jumps() const { return jumps_; }
    const std::string& label() const { return label_; }
    // max(||H||_inf, ||sum L†L||_inf)
    double rate_scale() const { return scale_; }

  private:
    Generator() = default;
    std::size_t dim_ = 0;
    std::optional<Operator> constant_;
    std::function<Matrix(double)> driven_;
    JumpSet jumps_;
    std::string label_;
    double scale_ = 0.0;
};

// 0.05 / rate_scale; t_final when the generator is identically zero.
double default_step(const Generator& gen, double t_final);

// Number of RK4 steps a run to t_final takes under ctrl: ceil(t_final / dt),
// with dt shrunk so the last step lands on t_final.
std::size_t planned_steps(const Generator& gen, double t_final, const StepControl& ctrl);

// -i[H, rho] + sum_L (L rho L† - {L†L, rho}/2)
Matrix lindblad_rhs(const DensityMatrix& rho, const Operator& hamiltonian, const JumpSet& jumps);

using MasterObserver = std::function<void(double t, const Matrix& rho)>;
using PureObserver = std::function<void(double t, const Vector& psi)>;

// Fixed-step RK4 on the master equation. rho is re-Hermitized after every
// step; trace drift beyond ctrl.trace_tolerance or a non-finite entry throws
// NumericalError. `observer` sees every step (t = 0 included).
MasterTrajectory evolve_master(const DensityMatrix& rho0, const Generator& gen, double t_final,
                               const StepControl& ctrl, const MasterObserver& observer = {});

// Fixed-step RK4 on d psi/dt = -i H(t) psi. Jumps are ignored. Norm drift
// beyond ctrl.trace_tolerance throws; the state is never renormalized.
PureTrajectory evolve_schrodinger(const StateVector& psi0, const Generator& gen, double t_final,
                                  const StepControl& ctrl, const PureObserver& observer = {});

// RK4 on the no-jump equation d psi/dt = -i (H - i/2 sum L†L) psi. The norm
// decays with the jump probability; only non-finite values abort.
Vector propagate_no_jump(const Vector& psi0, const Generator& gen, double t_final,
                         const StepControl& ctrl);

// exp(-iHt) by Hermitian eigendecomposition. Throws for non-Hermitian H.
Operator propagator_oracle(const Operator& hamiltonian, double t);

struct StateMetrics {
    double fidelity = 0.0;       // (Tr sqrt(sqrt(x) y sqrt(x)))^2
    double trace_distance = 0.0; // ||x - y||_1 / 2
    double purity = 0.0;         // Tr x^2
};

// Inputs must have unit trace within 1e-6.
StateMetrics state_metrics(const Matrix& x, const Matrix& y);
StateMetrics state_metrics(const DensityMatrix& x, const DensityMatrix& y);
StateMetrics state_metrics(const StateVector& x, const StateVector& y);

double trace_distance(const Matrix& x, const Matrix& y);

// `t,<labels...>` header then one row per time, 17 significant digits.
std::string trajectory_csv(const std::vector<std::string>& labels,
                           const std::vector<double>& times,
                           const std::vector<std::vector<double>>& rows);

} // namespace qcavity
