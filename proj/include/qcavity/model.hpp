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

#include <string>
#include <string_view>
#include <vector>

#include "qcavity/hilbert.hpp"

namespace qcavity {

enum class Model { Full, Eliminated, Dispersive, Reduced, Geometric };

std::string_view to_string(Model model);
// Accepts "full", "eliminated", "dispersive", "reduced", "geometric".
Model parse_model(std::string_view name);

//
// Physical parameters. All rates and frequencies share one inverse-time
// unit; g = 1 is the conventional scale.
//
struct SystemParams {
    double omega0 = 0.0;  // level |0>
    double omega3 = 0.0;  // level |3>
    double omega_c = 0.0; // cavity
    double g = 1.0;       // ion-cavity coupling, equal for both ions
    double Omega = 0.0;   // laser on ion 1, |1> <-> |3>
    double kappa = 0.0;   // cavity field decay; photon loss rate is 2*kappa
    double tau = 0.0;     // spontaneous emission rate per channel

    // omega0 = omega3 = 0, omega_c = Delta.
    static SystemParams from_detuning(double Delta, double g = 1.0, double Omega = 0.0,
                                      double kappa = 0.0, double tau = 0.0);

    double delta() const { return omega_c - omega3 + omega0; }
    // g^2 / Delta
    double dispersive_shift() const { return g * g / delta(); }

    // Throws InvalidArgument unless g > 0 and kappa, tau, Omega >= 0 (all finite).
    void validate() const;

    // Regime predicates; reported, never enforced.
    bool dispersive() const { return delta() >= 10.0 * g; }
    bool cavity_safe() const { return delta() >= 10.0 * kappa; }
    bool emission_safe() const { return dispersive_shift() >= 10.0 * tau; }
    bool rabi_slow() const { return dispersive_shift() >= 10.0 * Omega; }

    bool operator==(const SystemParams&) const = default;
};

struct JumpOperator {
    Operator op;
    std::string label;
};
using JumpSet = std::vector<JumpOperator>;

struct EffectiveGenerator {
    Operator hamiltonian;
    JumpSet jumps;
};

// H = w0(s00^1+s00^2) + w3(s33^1+s33^2) + wc a†a + g a†(s03^1+s03^2)
//     + g a(s30^1+s30^2) + Omega(s31^1+s13^1), bare frequencies kept.
Operator full_hamiltonian(const SystemParams& p, const HilbertSpec& spec);

// Diagonal bare-energy part of full_hamiltonian; generator of the
// interaction-picture frame.
Operator bare_hamiltonian(const SystemParams& p, const HilbertSpec& spec);

// sqrt(2 kappa) a, then sqrt(2 tau) s03^i and sqrt(2 tau) s13^i for i = 1, 2.
// Zero rates drop their entries. The cavity jump needs a cavity factor.
JumpSet collect_jump_operators(const SystemParams& p, const HilbertSpec& spec);
JumpSet atomic_jumps(const SystemParams& p, const HilbertSpec& spec);

// g^2 Delta / (kappa^2 + Delta^2)
double exchange_coefficient(const SystemParams& p);
// 2 g^2 kappa / (kappa^2 + Delta^2)
double collective_decay_rate(const SystemParams& p);

// Cavity-eliminated generator on an ions-only spec, interaction picture:
//   H = -c (s33^1 + s33^2 + s30^1 s03^2 + s03^1 s30^2) + Omega(s31^1 + s13^1),
//   c = exchange_coefficient(p),
// jumps = { sqrt(collective_decay_rate) (s03^1 + s03^2) } + atomic_jumps.
// The shift is negative for Delta > 0: the vacuum-dressed excited manifold
// is pushed away from the cavity resonance. Throws for Delta = 0.
EffectiveGenerator eliminated_generator(const SystemParams& p, const HilbertSpec& spec);

// Dispersive Hamiltonian in the nine-state basis {|00>,|01>,|10>,|11>,|31>,
// |13>,|33>,|phi+>,|phi->}, Hermitian closure of the laser terms:
//   -(g^2/Delta)(2|33><33| + 2|phi+><phi+| + |31><31| + |13><13|)
//   + Omega(|33><13| + |31><11| + |phi+><10|/sqrt2 + |phi-><10|/sqrt2) + h.c.
Operator dispersive_hamiltonian(const SystemParams& p, const HilbertSpec& spec);

// (Omega/sqrt2)(|phi-><10| + |10><phi-|), phi- = (|30> - |03>)/sqrt2.
Operator reduced_hamiltonian(double Omega, const HilbertSpec& spec);

// (1/sqrt2)(Omega2 |phi-><20| + Omega1 |phi-><10| + h.c.). Needs level 2 on
// ion 1.
Operator geometric_hamiltonian(Complex Omega1, Complex Omega2, const HilbertSpec& spec);

// A model ready to integrate: its space, Hamiltonian, jumps and the
// bare-frequency generator of its interaction-picture frame (zero for the
// effective models, which are stated in that frame already).
struct ModelInstance {
    Model model;
    HilbertSpec spec;
    Operator hamiltonian;
    JumpSet jumps;
    Operator bare;
};

// full: levels {0,1,3} with a cavity cut at fock_cutoff, all five jumps.
// eliminated: eliminated_generator. dispersive: dispersive_hamiltonian with
// atomic_jumps. reduced: reduced_hamiltonian(Omega), no jumps. geometric:
// levels {0,1,2,3}, drive frozen at the loop start (Omega1 = 0,
// Omega2 = Omega), no jumps.
ModelInstance build_model(Model model, const SystemParams& p, int fock_cutoff = 2);

} // namespace qcavity
