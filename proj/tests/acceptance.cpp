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

// Acceptance checks. `acceptance N` runs criterion N and prints one
// PASS/FAIL line; the exit status is 0 only on PASS.

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "qcavity/dynamics.hpp"
#include "qcavity/errors.hpp"
#include "qcavity/gate.hpp"
#include "qcavity/geometric.hpp"
#include "qcavity/model.hpp"
#include "qcavity/scenario.hpp"
#include "test_support.hpp"

using namespace qcavity;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;
const fs::path kFixtures = QCAVITY_FIXTURES;
const fs::path kGolden = QCAVITY_GOLDEN;
const std::string kCli = QCAVITY_CLI;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string num(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", x);
    return buf;
}

std::string slurp(const fs::path& p)
{
    std::ifstream f(p, std::ios::binary);
    if (!f) {
        throw IoError("cannot read " + p.string());
    }
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::map<std::string, std::string> read_dir(const fs::path& dir)
{
    std::map<std::string, std::string> out;
    if (!fs::is_directory(dir)) {
        return out;
    }
    for (const auto& entry : fs::directory_iterator(dir)) {
        out[entry.path().filename().string()] = slurp(entry.path());
    }
    return out;
}

// dt close to `target` that splits t into a multiple of `parts` steps.
StepControl matched_steps(const Generator& gen, double t, double target, std::size_t parts,
                          std::size_t& steps)
{
    StepControl probe;
    probe.dt = target;
    steps = planned_steps(gen, t, probe);
    steps = (steps + parts - 1) / parts * parts;
    StepControl c;
    c.dt = t / (double(steps) - 0.25);
    c.record_every = std::numeric_limits<std::size_t>::max();
    if (planned_steps(gen, t, c) != steps) {
        throw InvalidArgument("step plan does not divide the run evenly");
    }
    return c;
}

Matrix traced_interaction(const Vector& psi, const ModelInstance& inst, double t)
{
    const Vector v = to_interaction_picture(psi, inst.bare, t);
    return trace_out_cavity(v * v.adjoint(), inst.spec);
}

StateVector computational_superposition(const HilbertSpec& spec)
{
    std::vector<std::pair<ProductLabel, Complex>> terms;
    for (const ProductLabel& l : kComputationalBasis) {
        terms.push_back({l, 1.0});
    }
    return superposition(terms, spec);
}

//
// 1. RK4 against the eigendecomposition propagator.
//
Outcome criterion1()
{
    std::mt19937_64 rng(20261016);
    std::uniform_real_distribution<double> norm(1.0, 10.0);
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
        const double h_norm = norm(rng);
        const Operator h(testing::random_hermitian(rng, 48, h_norm));
        const StateVector psi(testing::random_unit_vector(rng, 48));
        const double t = 10.0 / h_norm;
        StepControl c;
        c.dt = 1e-3;
        c.record_every = std::numeric_limits<std::size_t>::max();
        const auto traj = evolve_schrodinger(psi, Generator::constant(h), t, c);
        const Vector exact = propagator_oracle(h, t).matrix() * psi.amplitudes();
        worst = std::max(worst, (traj.states.back().amplitudes() - exact).norm());
    }
    return {worst <= 1e-6, "10 random 48-dim H, ||H|| t = 10, dt = 1e-3: max state error " + num(worst)
                               + " (limit 1e-6)"};
}

//
// 2. Invariants along the golden full-model Lindblad run.
//
Outcome criterion2()
{
    const ScenarioConfig cfg = parse_config(slurp(kFixtures / "golden" / "simulate_full.json"));
    const ModelInstance inst = build_model(cfg.model, cfg.params, cfg.fock_cutoff);
    const Generator gen = Generator::constant(inst.hamiltonian, inst.jumps);
    StepControl c;
    c.dt = cfg.integrator.dt;
    c.trace_tolerance = cfg.integrator.trace_tolerance;
    const std::size_t steps = planned_steps(gen, cfg.simulate.t_final, c);
    c.record_every = std::max<std::size_t>(1, steps / cfg.simulate.samples);

    double trace_drift = 0.0;
    const MasterObserver watch = [&](double, const Matrix& rho) {
        trace_drift = std::max(trace_drift, std::abs(rho.trace() - Complex(1.0)));
    };
    const auto traj = evolve_master(DensityMatrix::pure(computational_superposition(inst.spec)),
                                    gen, cfg.simulate.t_final, c, watch);
    double min_eig = 1.0;
    for (const DensityMatrix& rho : traj.states) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix(), Eigen::EigenvaluesOnly);
        min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
    }
    const double herm = traj.meta.max_hermiticity_drift;
    const bool ok = trace_drift <= 1e-6 && herm <= 1e-9 && min_eig >= -1e-6;
    return {ok, "Delta=50g kappa=0.5g tau=0.001g, " + std::to_string(traj.meta.steps)
                    + " steps: max |Tr rho - 1| " + num(trace_drift) + ", Hermiticity drift "
                    + num(herm) + ", min eigenvalue over " + std::to_string(traj.states.size())
                    + " frames " + num(min_eig)};
}

//
// 3. Reduced model gate.
//
Outcome criterion3()
{
    SystemParams p;
    p.Omega = 0.05;
    const GateReport r = extract_gate(Model::Reduced, p, gate_time(p.Omega));
    const double err = (r.extracted - ideal_phase_gate()).cwiseAbs().maxCoeff();
    return {err <= 1e-6 && r.fidelity >= 1.0 - 1e-6,
            "Omega=0.05g, t=pi sqrt2/Omega: max entry error " + num(err) + ", infidelity "
                + num(1.0 - r.fidelity)};
}

//
// 4. Dispersive model gate at g^2/Delta = 20 Omega.
//
Outcome criterion4()
{
    const SystemParams p = SystemParams::from_detuning(50.0, 1.0, 0.001);
    const GateReport r = extract_gate(Model::Dispersive, p, gate_time(p.Omega));
    return {r.fidelity >= 0.99, "g^2/Delta=0.02g, Omega=0.001g: fidelity " + std::to_string(r.fidelity)
                                    + " (limit 0.99)"};
}

//
// 5. Full model against the dispersive limit at fixed Omega / (g^2/Delta).
//
Outcome criterion5()
{
    const double deltas[] = {20.0, 40.0, 80.0};
    double infid[3] = {}, gap[3] = {};
    double distance = 0.0;
    for (int k = 0; k < 3; ++k) {
        const double D = deltas[k];
        const SystemParams p = SystemParams::from_detuning(D, 1.0, 0.1 / D);
        const double t = gate_time(p.Omega);
        GateOptions opt;
        opt.ctrl.dt = 0.125 / D;
        const GateReport full = extract_gate(Model::Full, p, t, opt);
        const GateReport disp = extract_gate(Model::Dispersive, p, t);
        infid[k] = 1.0 - full.fidelity;
        gap[k] = std::abs(full.fidelity - disp.fidelity);

        if (k == 2) {
            // Final ion states for the four basis inputs; the superposition
            // follows by linearity.
            const ModelInstance fm = build_model(Model::Full, p, 2);
            const ModelInstance dm = build_model(Model::Dispersive, p);
            const Operator ud = propagator_oracle(dm.hamiltonian, t);
            Vector sum_full = Vector::Zero(Eigen::Index(fm.spec.dim()));
            Vector sum_disp = Vector::Zero(Eigen::Index(dm.spec.dim()));
            StepControl c = opt.ctrl;
            c.record_every = std::numeric_limits<std::size_t>::max();
            for (const ProductLabel& l : kComputationalBasis) {
                const auto traj = evolve_schrodinger(basis_state(l, fm.spec),
                                                     Generator::constant(fm.hamiltonian), t, c);
                const Vector pf = traj.states.back().amplitudes();
                const Vector pd = ud.matrix() * basis_state(l, dm.spec).amplitudes();
                distance = std::max(distance, trace_distance(traced_interaction(pf, fm, t),
                                                             pd * pd.adjoint()));
                sum_full += 0.5 * pf;
                sum_disp += 0.5 * pd;
            }
            distance = std::max(distance, trace_distance(traced_interaction(sum_full, fm, t),
                                                         sum_disp * sum_disp.adjoint()));
        }
    }
    const bool monotone = infid[1] < infid[0] && infid[2] < infid[1];
    std::printf("info criterion 5: |F_full - F_dispersive| = %s, %s, %s (%s)\n", num(gap[0]).c_str(),
                num(gap[1]).c_str(), num(gap[2]).c_str(),
                gap[1] < gap[0] && gap[2] < gap[1] ? "strictly decreasing" : "not decreasing");
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "full infidelity at Delta/g = 20, 40, 80: %.6f, %.6f, %.6f (%s); "
                  "trace distance at Delta=80g %s (limit 0.02)",
                  infid[0], infid[1], infid[2],
                  monotone ? "strictly decreasing" : "NOT strictly decreasing", num(distance).c_str());
    return {monotone && distance <= 0.02, buf};
}

//
// 6 and 7. Full model with cavity loss against the eliminated generator.
//
struct EliminationObservables {
    std::vector<double> distance; // at k t_gate / 10, k = 1..10
    double peak_photons = 0.0;
};

EliminationObservables elimination_observables(int fock_cutoff)
{
    const SystemParams p = SystemParams::from_detuning(50.0, 1.0, 0.1 / 50.0, 0.5, 0.0);
    const double t = gate_time(p.Omega);
    const ModelInstance fm = build_model(Model::Full, p, fock_cutoff);
    const ModelInstance em = build_model(Model::Eliminated, p);
    const Generator fg = Generator::constant(fm.hamiltonian, fm.jumps);
    const Generator eg = Generator::constant(em.hamiltonian, em.jumps);

    std::size_t full_steps = 0, elim_steps = 0;
    const StepControl fc = matched_steps(fg, t, 0.0025, 10, full_steps);
    const StepControl ec = matched_steps(eg, t, 0.05, 10, elim_steps);

    const Vector number = photon_number(fm.spec).matrix().diagonal();
    std::vector<Matrix> full_frames, elim_frames;
    EliminationObservables out;
    std::size_t n = 0;
    const MasterObserver full_watch = [&](double time, const Matrix& rho) {
        out.peak_photons = std::max(out.peak_photons, (number.array() * rho.diagonal().array()).sum().real());
        if (n > 0 && n % (full_steps / 10) == 0) {
            full_frames.push_back(trace_out_cavity(to_interaction_picture(rho, fm.bare, time), fm.spec));
        }
        ++n;
    };
    evolve_master(DensityMatrix::pure(computational_superposition(fm.spec)), fg, t, fc, full_watch);
    std::size_t m = 0;
    const MasterObserver elim_watch = [&](double, const Matrix& rho) {
        if (m > 0 && m % (elim_steps / 10) == 0) {
            elim_frames.push_back(rho);
        }
        ++m;
    };
    evolve_master(DensityMatrix::pure(computational_superposition(em.spec)), eg, t, ec, elim_watch);
    if (full_frames.size() != 10 || elim_frames.size() != 10) {
        throw InvalidArgument("expected 10 matched frames");
    }
    for (std::size_t k = 0; k < 10; ++k) {
        out.distance.push_back(trace_distance(full_frames[k], elim_frames[k]));
    }
    return out;
}

Outcome criterion6()
{
    const EliminationObservables o = elimination_observables(2);
    const double worst = *std::max_element(o.distance.begin(), o.distance.end());
    const double limit = 2.0 * (1.0 / 50.0) * (1.0 / 50.0);
    return {worst <= 0.05 && o.peak_photons <= limit,
            "Delta=50g kappa=0.5g: max trace distance over 10 times " + num(worst)
                + " (limit 0.05), peak <n> " + num(o.peak_photons) + " (limit " + num(limit) + ")"};
}

Outcome criterion7()
{
    const EliminationObservables a = elimination_observables(2);
    const EliminationObservables b = elimination_observables(3);
    double change = std::abs(a.peak_photons - b.peak_photons);
    for (std::size_t k = 0; k < a.distance.size(); ++k) {
        change = std::max(change, std::abs(a.distance[k] - b.distance[k]));
    }
    return {change <= 1e-6, "n_max 2 -> 3: largest change in the criterion-6 observables "
                                + num(change) + " (limit 1e-6)"};
}

//
// 8. Berry phase of the cap loop.
//
Outcome criterion8()
{
    const double theta0 = 2.0 * kPi / 3.0;
    const BerryReport fwd = adiabatic_run(standard_loop(theta0, 2000.0, 0.1), 1.0);
    const BerryReport rev = adiabatic_run(standard_loop(theta0, 2000.0, 0.1, -1.0), 1.0);
    const double magnitude_err = std::abs(std::abs(fwd.numeric_phase) - kPi / 2.0);
    // Half of the enclosed 3 pi, wrapped into (-pi, pi]: magnitude pi / 2.
    const double half_err =
        std::abs(std::abs(fwd.numeric_phase) - std::abs(std::remainder(0.5 * fwd.surface_integral, 2.0 * kPi)));
    const bool flips = fwd.numeric_phase * rev.numeric_phase < 0.0
                       && std::abs(fwd.numeric_phase + rev.numeric_phase) <= 0.05;
    double decoupled = 0.0;
    for (const BerryReport* r : {&fwd, &rev}) {
        for (const DecoupledResult& d : r->decoupled) {
            decoupled = std::max(decoupled, std::abs(d.phase));
        }
    }
    const bool ok = fwd.return_amplitude >= 0.999 && fwd.dynamical_phase_bound <= 1e-3
                    && magnitude_err <= 0.05 && half_err <= 0.05
                    && std::abs(fwd.half_surface_integral - 1.5 * kPi) <= 1e-6 && flips
                    && decoupled <= 1e-9;
    char buf[320];
    std::snprintf(buf, sizeof(buf),
                  "theta0=2pi/3, Omega_bar T=2000: |<10|psi(T)>| %.6f, dynamical bound %s rad, "
                  "phase %.5f (reversed %.5f), surface integral %.5f, decoupled phase max %s",
                  fwd.return_amplitude, num(fwd.dynamical_phase_bound).c_str(), fwd.numeric_phase,
                  rev.numeric_phase, fwd.surface_integral, num(decoupled).c_str());
    return {ok, buf};
}

//
// 9. Golden configs through the CLI, serial and with 4 workers.
//
Outcome criterion9()
{
    const fs::path work = fs::temp_directory_path() / ("qcavity-acceptance-" + std::to_string(::getpid()));
    fs::remove_all(work);
    std::string bad;
    int count = 0;
    for (const auto& entry : fs::directory_iterator(kFixtures / "golden")) {
        const std::string stem = entry.path().stem().string();
        const ScenarioConfig cfg = parse_config(slurp(entry.path()));
        std::map<std::string, std::string> runs[2];
        for (int w = 0; w < 2; ++w) {
            const fs::path dir = work / (stem + (w == 0 ? "-1" : "-4"));
            const std::string cmd = kCli + " " + std::string(to_string(cfg.task)) + " --config "
                                    + entry.path().string() + " --out " + dir.string() + " --quiet"
                                    + (w == 0 ? "" : " --workers 4");
            const int status = std::system(cmd.c_str());
            if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
                bad += " " + stem + "(exit)";
            }
            runs[w] = read_dir(dir);
        }
        const auto frozen = read_dir(kGolden / stem);
        if (runs[0].empty() || runs[0] != runs[1]) {
            bad += " " + stem + "(workers)";
        }
        if (runs[0] != frozen) {
            bad += " " + stem + "(golden)";
        }
        ++count;
    }
    fs::remove_all(work);
    return {bad.empty() && count > 0,
            std::to_string(count) + " golden configs, --workers 1 vs 4 vs frozen outputs: "
                + (bad.empty() ? "byte-identical" : "mismatch in" + bad)};
}

} // namespace

int main(int argc, char** argv)
{
    const std::map<int, std::function<Outcome()>> criteria{
        {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4}, {5, criterion5},
        {6, criterion6}, {7, criterion7}, {8, criterion8}, {9, criterion9}};
    std::vector<int> which;
    for (int i = 1; i < argc; ++i) {
        which.push_back(std::atoi(argv[i]));
    }
    if (which.empty()) {
        for (const auto& [k, _] : criteria) {
            which.push_back(k);
        }
    }
    int failed = 0;
    for (int k : which) {
        const auto it = criteria.find(k);
        Outcome o;
        if (it == criteria.end()) {
            o = {false, "no such criterion"};
        } else {
            try {
                o = it->second();
            } catch (const std::exception& e) {
                o = {false, std::string("error: ") + e.what()};
            }
        }
        std::printf("%s criterion %d: %s\n", o.pass ? "PASS" : "FAIL", k, o.detail.c_str());
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
