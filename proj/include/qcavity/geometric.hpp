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
#include <functional>
#include <string>
#include <vector>

#include "qcavity/dynamics.hpp"
#include "qcavity/hilbert.hpp"

namespace qcavity {

struct LoopPoint {
    double theta = 0.0;
    double phi = 0.0;
};

// One arc of a control loop: shape(s) for s in [0, 1], traversed in
// `duration`.
struct LoopSegment {
    std::function<LoopPoint(double)> shape;
    double duration = 0.0;
    std::string label;
};

//
// Closed path in (theta, phi) starting and ending at theta = 0. Segments
// join continuously (gap <= 1e-12) and stay inside theta in [0, pi].
//
class LoopPath {
  public:
    explicit LoopPath(std::vector<LoopSegment> segments);

    const std::vector<LoopSegment>& segments() const { return segments_; }
    double total_time() const { return total_; }
    // Clamped to [0, T].
    LoopPoint point_at(double t) const;
    // Net phi advance over 2 pi; negative for a reversed sweep.
    double windings() const;

  private:
    std::vector<LoopSegment> segments_;
    double total_ = 0.0;
};

// Cap loop: sin^2 ramp of theta from 0 to theta0 at phi = 0, phi sweep over
// 2 pi * windings at theta0 with profile s - sin(2 pi s)/(2 pi), cos^2 ramp
// back to 0. Each ramp takes ramp_fraction * T. Negative windings sweep the
// other way.
LoopPath standard_loop(double theta0, double T, double ramp_fraction, double windings = 1.0);

struct DriveAmplitudes {
    Complex Omega1;
    Complex Omega2;
};

// Omega1 = -Omega_bar sin(theta/2) e^{i phi}, Omega2 = Omega_bar cos(theta/2).
DriveAmplitudes drive_amplitudes(const LoopPath& path, double t, double Omega_bar);
DriveAmplitudes drive_amplitudes(LoopPoint point, double Omega_bar);

// cos(theta/2)|10> + sin(theta/2) e^{i phi}|20>.
StateVector dark_state(double theta, double phi, const HilbertSpec& spec);

// Line integral of (1 - cos theta) dphi around the loop, composite trapezoid
// over `samples` uniform time points. Equals the enclosed solid angle,
// signed by the sweep direction. Throws for an open path.
double surface_integral(const LoopPath& path, std::size_t samples = 10000);

// Space of the geometric model: levels {0,1,2,3} on both ions.
HilbertSpec geometric_space();

struct DecoupledResult {
    ProductLabel input;
    Complex amplitude;  // <input|psi(T)>
    double phase = 0.0; // arg of amplitude
};

struct BerryReport {
    double theta0 = 0.0;
    double windings = 0.0;
    double total_time = 0.0;
    double Omega_bar = 0.0;
    double dt = 0.0;
    std::size_t steps = 0;
    // arg <10|psi(T)>, in (-pi, pi].
    double numeric_phase = 0.0;
    // Enclosed solid angle and its half.
    double surface_integral = 0.0;
    double half_surface_integral = 0.0;
    // Integral of |<psi|H|psi>| dt for the |10> input.
    double dynamical_phase_bound = 0.0;
    // max_t |<psi|H|psi>| for the |10> input.
    double max_energy = 0.0;
    // Population outside span{|10>, |20>} at T.
    double adiabatic_leakage = 0.0;
    double return_amplitude = 0.0; // |<10|psi(T)>|
    std::array<DecoupledResult, 3> decoupled{};
    // Omega_bar T >= 100 |windings|.
    bool adiabatic = true;
    std::string warning;
};

// Evolves |10> and the decoupled inputs |00>, |01>, |11> through the loop
// under the time-dependent geometric Hamiltonian (closed system).
BerryReport adiabatic_run(const LoopPath& path, double Omega_bar, const StepControl& ctrl = {},
                          std::size_t workers = 1);

} // namespace qcavity
