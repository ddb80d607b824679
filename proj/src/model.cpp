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

#include "qcavity/model.hpp"

#include <cmath>

#include "qcavity/errors.hpp"

namespace qcavity {

namespace {

void require_levels(const HilbertSpec& spec, std::initializer_list<Level> levels, int ion,
                    const char* who)
{
    for (Level l : levels) {
        if (!spec.has_level(ion, l)) {
            throw InvalidArgument(std::string(who) + ": ion " + std::to_string(ion)
                                  + " lacks level " + std::to_string(l));
        }
    }
}

void require_ions_only(const HilbertSpec& spec, const char* who)
{
    if (spec.has_cavity()) {
        throw InvalidArgument(std::string(who) + " is defined on the ions-only space");
    }
}

void require_nonzero_detuning(const SystemParams& p, const char* who)
{
    if (p.delta() == 0.0) {
        throw InvalidArgument(std::string(who) + ": Delta = 0 makes the elimination singular");
    }
}

Matrix ket(const ProductLabel& label, const HilbertSpec& spec)
{
    return basis_state(label, spec).amplitudes();
}

Matrix outer(const Vector& a, const Vector& b) { return a * b.adjoint(); }

} // namespace

std::string_view to_string(Model model)
{
    switch (model) {
    case Model::Full:
        return "full";
    case Model::Eliminated:
        return "eliminated";
    case Model::Dispersive:
        return "dispersive";
    case Model::Reduced:
        return "reduced";
    case Model::Geometric:
        return "geometric";
    }
    return "?";
}

Model parse_model(std::string_view name)
{
    for (Model m : {Model::Full, Model::Eliminated, Model::Dispersive, Model::Reduced,
                    Model::Geometric}) {
        if (to_string(m) == name) {
            return m;
        }
    }
    throw InvalidArgument("unknown model '" + std::string(name) + "'");
}

SystemParams SystemParams::from_detuning(double Delta, double g, double Omega, double kappa,
                                         double tau)
{
    SystemParams p;
    p.omega_c = Delta;
    p.g = g;
    p.Omega = Omega;
    p.kappa = kappa;
    p.tau = tau;
    return p;
}

void SystemParams::validate() const
{
    for (double v : {omega0, omega3, omega_c, g, Omega, kappa, tau}) {
        if (!std::isfinite(v)) {
            throw InvalidArgument("system parameters must be finite");
        }
    }
    if (!(g > 0.0)) {
        throw InvalidArgument("g must be > 0");
    }
    if (kappa < 0.0 || tau < 0.0 || Omega < 0.0) {
        throw InvalidArgument("kappa, tau and Omega must be >= 0");
    }
}

Operator full_hamiltonian(const SystemParams& p, const HilbertSpec& spec)
{
    p.validate();
    if (!spec.has_cavity()) {
        throw InvalidArgument("full_hamiltonian needs a cavity factor");
    }
    for (int ion : {1, 2}) {
        require_levels(spec, {0, 1, 3}, ion, "full_hamiltonian");
    }
    const Operator a = cavity_annihilation(spec);
    const Matrix& am = a.matrix();
    Matrix h = bare_hamiltonian(p, spec).matrix();
    for (int ion : {1, 2}) {
        const Matrix s03 = ion_transition(0, 3, ion, spec).matrix();
        h += p.g * (am.adjoint() * s03 + am * s03.adjoint());
    }
    h += p.Omega
         * (ion_transition(3, 1, 1, spec).matrix() + ion_transition(1, 3, 1, spec).matrix());
    return Operator(std::move(h), "H_full");
}

Operator bare_hamiltonian(const SystemParams& p, const HilbertSpec& spec)
{
    const auto d = Eigen::Index(spec.dim());
    Matrix h = Matrix::Zero(d, d);
    for (Eigen::Index k = 0; k < d; ++k) {
        const ProductLabel l = spec.label(std::size_t(k));
        double e = p.omega_c * l.photons;
        for (Level level : {l.ion1, l.ion2}) {
            if (level == 0) {
                e += p.omega0;
            } else if (level == 3) {
                e += p.omega3;
            }
        }
        h(k, k) = e;
    }
    return Operator(std::move(h), "H_bare");
}

JumpSet atomic_jumps(const SystemParams& p, const HilbertSpec& spec)
{
    JumpSet jumps;
    if (p.tau <= 0.0) {
        return jumps;
    }
    const double amp = std::sqrt(2.0 * p.tau);
    for (int ion : {1, 2}) {
        for (Level ground : {0, 1}) {
            std::string label = "sqrt(2tau)*sigma(" + std::to_string(ground) + ",3)@ion"
                                + std::to_string(ion);
            Operator op(amp * ion_transition(ground, 3, ion, spec).matrix(), label);
            jumps.push_back({std::move(op), std::move(label)});
        }
    }
    return jumps;
}

JumpSet collect_jump_operators(const SystemParams& p, const HilbertSpec& spec)
{
    p.validate();
    JumpSet jumps;
    if (p.kappa > 0.0) {
        Operator op(std::sqrt(2.0 * p.kappa) * cavity_annihilation(spec).matrix(),
                    "sqrt(2kappa)*a");
        jumps.push_back({std::move(op), "sqrt(2kappa)*a"});
    }
    for (auto& j : atomic_jumps(p, spec)) {
        jumps.push_back(std::move(j));
    }
    return jumps;
}

double exchange_coefficient(const SystemParams& p)
{
    const double d = p.delta();
    return p.g * p.g * d / (p.kappa * p.kappa + d * d);
}

double collective_decay_rate(const SystemParams& p)
{
    const double d = p.delta();
    return 2.0 * p.g * p.g * p.kappa / (p.kappa * p.kappa + d * d);
}

EffectiveGenerator eliminated_generator(const SystemParams& p, const HilbertSpec& spec)
{
    p.validate();
    require_ions_only(spec, "eliminated_generator");
    require_nonzero_detuning(p, "eliminated_generator");
    for (int ion : {1, 2}) {
        require_levels(spec, {0, 1, 3}, ion, "eliminated_generator");
    }
    const Matrix s03_1 = ion_transition(0, 3, 1, spec).matrix();
    const Matrix s03_2 = ion_transition(0, 3, 2, spec).matrix();
    const Matrix collective = s03_1 + s03_2;
    // collective† collective = s33^1 + s33^2 + s30^1 s03^2 + s03^1 s30^2
    const Matrix exchange = collective.adjoint() * collective;

    Matrix h = -exchange_coefficient(p) * exchange;
    h += p.Omega
         * (ion_transition(3, 1, 1, spec).matrix() + ion_transition(1, 3, 1, spec).matrix());

    EffectiveGenerator gen{Operator(std::move(h), "H_eliminated"), {}};
    const double rate = collective_decay_rate(p);
    if (rate > 0.0) {
        std::string label = "sqrt(2g^2k/(k^2+D^2))*(sigma(0,3)@ion1+sigma(0,3)@ion2)";
        gen.jumps.push_back({Operator(std::sqrt(rate) * collective, label), label});
    }
    for (auto& j : atomic_jumps(p, spec)) {
        gen.jumps.push_back(std::move(j));
    }
    return gen;
}

Operator dispersive_hamiltonian(const SystemParams& p, const HilbertSpec& spec)
{
    p.validate();
    require_ions_only(spec, "dispersive_hamiltonian");
    require_nonzero_detuning(p, "dispersive_hamiltonian");
    for (int ion : {1, 2}) {
        require_levels(spec, {0, 1, 3}, ion, "dispersive_hamiltonian");
    }
    const Vector k10 = ket({1, 0}, spec);
    const Vector k11 = ket({1, 1}, spec);
    const Vector k31 = ket({3, 1}, spec);
    const Vector k13 = ket({1, 3}, spec);
    const Vector k33 = ket({3, 3}, spec);
    const Vector phi_p = phi_state(+1, spec).amplitudes();
    const Vector phi_m = phi_state(-1, spec).amplitudes();

    const double shift = -p.dispersive_shift();
    Matrix h = shift
               * (2.0 * outer(k33, k33) + 2.0 * outer(phi_p, phi_p) + outer(k31, k31)
                  + outer(k13, k13));
    const double r = 1.0 / std::sqrt(2.0);
    Matrix drive =
        p.Omega * (outer(k33, k13) + outer(k31, k11) + r * outer(phi_p, k10) + r * outer(phi_m, k10));
    h += drive + drive.adjoint();
    return Operator(std::move(h), "H_dispersive");
}

Operator reduced_hamiltonian(double Omega, const HilbertSpec& spec)
{
    require_ions_only(spec, "reduced_hamiltonian");
    if (!std::isfinite(Omega)) {
        throw InvalidArgument("reduced_hamiltonian: Omega must be finite");
    }
    const Vector k10 = ket({1, 0}, spec);
    const Vector phi_m = phi_state(-1, spec).amplitudes();
    const Matrix coupling = (Omega / std::sqrt(2.0)) * outer(phi_m, k10);
    return Operator(coupling + coupling.adjoint(), "H_reduced");
}

Operator geometric_hamiltonian(Complex Omega1, Complex Omega2, const HilbertSpec& spec)
{
    require_ions_only(spec, "geometric_hamiltonian");
    require_levels(spec, {0, 1, 2, 3}, 1, "geometric_hamiltonian");
    require_levels(spec, {0, 3}, 2, "geometric_hamiltonian");
    const Vector k10 = ket({1, 0}, spec);
    const Vector k20 = ket({2, 0}, spec);
    const Vector phi_m = phi_state(-1, spec).amplitudes();
    const Matrix coupling =
        (1.0 / std::sqrt(2.0)) * (Omega2 * outer(phi_m, k20) + Omega1 * outer(phi_m, k10));
    return Operator(coupling + coupling.adjoint(), "H_geometric");
}

ModelInstance build_model(Model model, const SystemParams& p, int fock_cutoff)
{
    p.validate();
    switch (model) {
    case Model::Full: {
        HilbertSpec spec = HilbertSpec::with_cavity({0, 1, 3}, fock_cutoff);
        Operator h = full_hamiltonian(p, spec);
        JumpSet jumps = collect_jump_operators(p, spec);
        Operator bare = bare_hamiltonian(p, spec);
        return {model, std::move(spec), std::move(h), std::move(jumps), std::move(bare)};
    }
    case Model::Eliminated: {
        HilbertSpec spec = HilbertSpec::ions_only({0, 1, 3});
        EffectiveGenerator gen = eliminated_generator(p, spec);
        Operator bare = Operator::zero(spec.dim());
        return {model, std::move(spec), std::move(gen.hamiltonian), std::move(gen.jumps),
                std::move(bare)};
    }
    case Model::Dispersive: {
        HilbertSpec spec = HilbertSpec::ions_only({0, 1, 3});
        Operator h = dispersive_hamiltonian(p, spec);
        JumpSet jumps = atomic_jumps(p, spec);
        Operator bare = Operator::zero(spec.dim());
        return {model, std::move(spec), std::move(h), std::move(jumps), std::move(bare)};
    }
    case Model::Reduced: {
        HilbertSpec spec = HilbertSpec::ions_only({0, 1, 3});
        Operator h = reduced_hamiltonian(p.Omega, spec);
        Operator bare = Operator::zero(spec.dim());
        return {model, std::move(spec), std::move(h), {}, std::move(bare)};
    }
    case Model::Geometric: {
        HilbertSpec spec = HilbertSpec::ions_only({0, 1, 2, 3});
        Operator h = geometric_hamiltonian(0.0, p.Omega, spec);
        Operator bare = Operator::zero(spec.dim());
        return {model, std::move(spec), std::move(h), {}, std::move(bare)};
    }
    }
    throw InvalidArgument("unknown model");
}

} // namespace qcavity
