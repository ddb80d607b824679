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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "qcavity/dynamics.hpp"
#include "qcavity/errors.hpp"
#include "qcavity/model.hpp"
#include "test_support.hpp"

using namespace qcavity;
using qcavity::testing::max_abs;

namespace {

const HilbertSpec kFull = HilbertSpec::with_cavity({0, 1, 3}, 2);
const HilbertSpec kIons = HilbertSpec::ions_only({0, 1, 3});

StepControl step(double dt, std::size_t every = 1)
{
    StepControl c;
    c.dt = dt;
    c.record_every = every;
    return c;
}

} // namespace

TEST_CASE("lindblad_rhs: trivial generator")
{
    std::mt19937_64 rng(1);
    const DensityMatrix rho(testing::random_density(rng, 6));
    CHECK(max_abs(lindblad_rhs(rho, Operator::zero(6), {})) == 0.0);
}

TEST_CASE("lindblad_rhs: photon loss rate")
{
    const double k = 0.37;
    const JumpSet jumps{{std::sqrt(2.0 * k) * cavity_annihilation(kFull), "cavity"}};
    const DensityMatrix rho = DensityMatrix::pure(basis_state({0, 0, 1}, kFull));
    const Matrix rhs = lindblad_rhs(rho, Operator::zero(kFull.dim()), jumps);
    const Complex dn = (photon_number(kFull).matrix() * rhs).trace();
    CHECK(std::abs(dn - Complex(-2.0 * k)) < 1e-14);
}

TEST_CASE("lindblad_rhs: traceless and Hermitian on random instances")
{
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> dim_dist(2, 12);
    std::uniform_int_distribution<int> njump_dist(0, 3);
    for (int trial = 0; trial < 100; ++trial) {
        const int d = dim_dist(rng);
        const DensityMatrix rho(testing::random_density(rng, d));
        const Operator h(testing::random_hermitian(rng, d, 3.0));
        JumpSet jumps;
        for (int j = njump_dist(rng); j > 0; --j) {
            jumps.push_back({Operator(testing::random_matrix(rng, d, 0.5)), "L"});
        }
        const Matrix rhs = lindblad_rhs(rho, h, jumps);
        const double scale = std::max(1.0, max_abs(rhs));
        CHECK(std::abs(rhs.trace()) / scale < 1e-12);
        CHECK(max_abs(rhs - rhs.adjoint()) / scale < 1e-12);
    }
    CHECK_THROWS_AS(lindblad_rhs(DensityMatrix(Matrix::Identity(2, 2) / 2.0),
                                 Operator::zero(3), {}),
                    InvalidArgument);
}

TEST_CASE("evolve_master: unitary channel conserves purity")
{
    std::mt19937_64 rng(5);
    const Operator h(testing::random_hermitian(rng, 9, 1.0));
    const StateVector psi(testing::random_unit_vector(rng, 9));
    const auto traj = evolve_master(DensityMatrix::pure(psi), Generator::constant(h), 1000.0,
                                    step(0.01, 10000));
    REQUIRE(traj.states.size() == 11);
    for (const auto& rho : traj.states) {
        CHECK(std::abs(rho.purity() - 1.0) < 1e-8);
    }
    for (std::size_t i = 1; i < traj.times.size(); ++i) {
        CHECK(traj.times[i] > traj.times[i - 1]);
    }
    CHECK(traj.times.back() == 1000.0);
    CHECK(traj.meta.steps == 100000);
}

TEST_CASE("evolve_master: two-level decay")
{
    const double tau = 0.8;
    Matrix l = Matrix::Zero(2, 2);
    l(0, 1) = std::sqrt(2.0 * tau); // |0><3|, index 1 is the excited level
    Matrix excited = Matrix::Zero(2, 2);
    excited(1, 1) = 1.0;
    const Generator gen = Generator::constant(Operator::zero(2), {{Operator(l), "decay"}});
    const double t = 1.0 / tau;
    const auto traj = evolve_master(DensityMatrix(excited), gen, t, step(1e-3, 125));
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const double p = traj.states[i].matrix()(1, 1).real();
        CHECK(std::abs(p - std::exp(-2.0 * tau * traj.times[i])) < 1e-6);
    }
    CHECK(traj.times.back() == doctest::Approx(t).epsilon(1e-15));
    CHECK(traj.meta.max_trace_drift < 1e-12);
}

TEST_CASE("evolve_master: |11> is stationary in the full model")
{
    const SystemParams p = SystemParams::from_detuning(50.0, 1.0, 0.0, 0.5, 0.01);
    const Generator gen = Generator::constant(full_hamiltonian(p, kFull),
                                              collect_jump_operators(p, kFull));
    const DensityMatrix rho0 = DensityMatrix::pure(basis_state({1, 1, 0}, kFull));
    const auto traj = evolve_master(rho0, gen, 20.0, step(0.005, 400));
    for (const auto& rho : traj.states) {
        CHECK(max_abs(rho.matrix() - rho0.matrix()) < 1e-12);
    }
}

TEST_CASE("evolve_master: Lindblad invariants and step halving")
{
    const SystemParams p = SystemParams::from_detuning(20.0, 1.0, 0.005, 0.5, 0.01);
    const Generator gen = Generator::constant(full_hamiltonian(p, kFull),
                                              collect_jump_operators(p, kFull));
    const std::pair<ProductLabel, Complex> terms[] = {{{1, 0, 0}, 1.0}, {{0, 1, 0}, 1.0}};
    const auto rho0 = DensityMatrix::pure(superposition(terms, kFull));
    StepControl c = step(0.01, 100);
    c.richardson_check = true;
    const auto traj = evolve_master(rho0, gen, 10.0, c);
    CHECK(traj.meta.max_trace_drift < 1e-10);
    CHECK(traj.meta.max_hermiticity_drift < 1e-13);
    CHECK(traj.meta.min_eigenvalue > -1e-10);
    REQUIRE(traj.meta.richardson_delta.has_value());
    CHECK(*traj.meta.richardson_delta < 1e-6);
}

TEST_CASE("evolve_master: unstable step aborts with the time")
{
    Matrix l = Matrix::Zero(2, 2);
    l(0, 1) = 10.0;
    Matrix excited = Matrix::Zero(2, 2);
    excited(1, 1) = 1.0;
    const Generator gen = Generator::constant(Operator::zero(2), {{Operator(l), "decay"}});
    try {
        evolve_master(DensityMatrix(excited), gen, 5.0, step(0.5));
        FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
        CHECK(e.time() > 0.0);
        CHECK(e.time() < 5.0);
        CHECK(std::string(e.what()).find("trace drift") != std::string::npos);
    }
}

TEST_CASE("evolve_schrodinger: zero Hamiltonian")
{
    std::mt19937_64 rng(9);
    const StateVector psi(testing::random_unit_vector(rng, 5));
    const auto traj = evolve_schrodinger(psi, Generator::constant(Operator::zero(5)), 3.0,
                                         step(0.1));
    CHECK((traj.states.back().amplitudes() - psi.amplitudes()).norm() == 0.0);
}

TEST_CASE("evolve_schrodinger: reduced model phase flip")
{
    const double Omega = 0.1;
    const double t = std::numbers::pi * std::sqrt(2.0) / Omega;
    const StateVector psi0 = basis_state({1, 0, 0}, kIons);
    const auto traj = evolve_schrodinger(psi0, Generator::constant(reduced_hamiltonian(Omega, kIons)),
                                         t, step(0.01));
    const Complex amp = psi0.overlap(traj.states.back());
    CHECK(std::abs(amp - Complex(-1.0)) < 1e-7);
}

TEST_CASE("evolve_schrodinger: Rabi transfer at 20 sample times")
{
    const double Omega = 0.3;
    const StateVector psi0 = basis_state({1, 0, 0}, kIons);
    const StateVector phi_m = phi_state(-1, kIons);
    const auto traj = evolve_schrodinger(
        psi0, Generator::constant(reduced_hamiltonian(Omega, kIons)), 20.0, step(0.001, 1000));
    REQUIRE(traj.states.size() == 21);
    for (std::size_t i = 1; i < traj.states.size(); ++i) {
        const double pop = std::norm(phi_m.overlap(traj.states[i]));
        CHECK(std::abs(pop - testing::rabi_transfer(Omega, traj.times[i])) < 1e-7);
    }
}

TEST_CASE("evolve_schrodinger: norm drift aborts")
{
    Matrix h = Matrix::Zero(2, 2);
    h(1, 1) = 100.0;
    const StateVector psi = StateVector::normalized(Vector::Ones(2));
    CHECK_THROWS_AS(evolve_schrodinger(psi, Generator::constant(Operator(h)), 1.0, step(0.1)),
                    NumericalError);
}

TEST_CASE("evolve_schrodinger: driven generator samples substage times")
{
    // H(t) = t * sigma_z, so each component picks up a phase of -+t^2/2.
    auto h = [](double t) {
        Matrix m = Matrix::Zero(2, 2);
        m(0, 0) = t;
        m(1, 1) = -t;
        return m;
    };
    const Generator gen = Generator::driven(2, h, {}, "ramp", 2.0);
    const StateVector psi0 = StateVector::normalized(Vector::Ones(2));
    const auto traj = evolve_schrodinger(psi0, gen, 2.0, step(1e-3));
    const Vector& out = traj.states.back().amplitudes();
    CHECK(std::abs(out(0) - std::exp(Complex(0.0, -2.0)) / std::sqrt(2.0)) < 1e-10);
    CHECK(std::abs(out(1) - std::exp(Complex(0.0, 2.0)) / std::sqrt(2.0)) < 1e-10);
}

TEST_CASE("propagator oracle")
{
    std::mt19937_64 rng(17);
    const Operator h(testing::random_hermitian(rng, 6, 2.0));
    CHECK(max_abs(propagator_oracle(h, 0.0).matrix() - Matrix::Identity(6, 6)) < 1e-14);

    Matrix d = Matrix::Zero(2, 2);
    d(1, 1) = 1.7;
    const Matrix u = propagator_oracle(Operator(d), 0.9).matrix();
    CHECK(std::abs(u(0, 0) - 1.0) < 1e-15);
    CHECK(std::abs(u(1, 1) - std::exp(Complex(0.0, -1.7 * 0.9))) < 1e-15);
    CHECK(std::abs(u(0, 1)) == 0.0);

    const Matrix v = propagator_oracle(h, 3.3).matrix();
    CHECK(max_abs(v * v.adjoint() - Matrix::Identity(6, 6)) < 1e-10);

    Matrix nh = Matrix::Zero(2, 2);
    nh(0, 1) = 1.0;
    CHECK_THROWS_AS(propagator_oracle(Operator(nh), 1.0), InvalidArgument);
}

TEST_CASE("RK4 against the oracle, 48 dimensions")
{
    std::mt19937_64 rng(48);
    const Operator h(testing::random_hermitian(rng, 48, 5.0));
    const StateVector psi(testing::random_unit_vector(rng, 48));
    const double t = 2.0;
    const auto traj = evolve_schrodinger(psi, Generator::constant(h), t, step(1e-3, 4000));
    const Vector exact = propagator_oracle(h, t).matrix() * psi.amplitudes();
    CHECK((traj.states.back().amplitudes() - exact).norm() < 1e-6);
}

TEST_CASE("no-jump propagation")
{
    // Norm decays as the no-jump probability exp(-2 tau t) for a single
    // emitting level.
    const double tau = 0.2;
    Matrix l = Matrix::Zero(2, 2);
    l(0, 1) = std::sqrt(2.0 * tau);
    const Generator gen = Generator::constant(Operator::zero(2), {{Operator(l), "decay"}});
    Vector psi = Vector::Zero(2);
    psi(1) = 1.0;
    const Vector out = propagate_no_jump(psi, gen, 2.0, step(1e-3));
    CHECK(std::abs(out.squaredNorm() - std::exp(-2.0 * tau * 2.0)) < 1e-10);
}

TEST_CASE("state metrics")
{
    const HilbertSpec spec = kIons;
    const StateVector a = basis_state({0, 0, 0}, spec);
    const StateVector b = basis_state({1, 0, 0}, spec);
    auto m = state_metrics(a, a);
    CHECK(m.fidelity == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.trace_distance < 1e-12);
    CHECK(m.purity == doctest::Approx(1.0));

    m = state_metrics(a, b);
    CHECK(m.fidelity < 1e-12);
    CHECK(m.trace_distance == doctest::Approx(1.0).epsilon(1e-12));

    const Matrix mixed = Matrix::Identity(2, 2) / 2.0;
    Matrix zero = Matrix::Zero(2, 2);
    zero(0, 0) = 1.0;
    m = state_metrics(mixed, zero);
    CHECK(m.fidelity == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(m.trace_distance == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(m.purity == doctest::Approx(0.5).epsilon(1e-12));

    CHECK_THROWS_AS(state_metrics(Matrix(Matrix::Identity(2, 2)), zero), InvalidArgument);

    // Fidelity against the pure-state overlap formula on random pairs.
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const StateVector x(testing::random_unit_vector(rng, 7));
        const StateVector y(testing::random_unit_vector(rng, 7));
        const double ov = std::norm(x.overlap(y));
        m = state_metrics(x, y);
        CHECK(std::abs(m.fidelity - ov) < 1e-8);
        CHECK(std::abs(m.trace_distance - std::sqrt(1.0 - ov)) < 1e-8);
    }
}

TEST_CASE("trajectory CSV")
{
    const std::string csv = trajectory_csv({"p0", "p1"}, {0.0, 0.1}, {{1.0, 0.0}, {0.9, 0.1}});
    CHECK(csv
          == "t,p0,p1\n"
             "0,1,0\n"
             "0.10000000000000001,0.90000000000000002,0.10000000000000001\n");
    CHECK_THROWS_AS(trajectory_csv({"p"}, {0.0}, {{1.0, 2.0}}), InvalidArgument);
}
