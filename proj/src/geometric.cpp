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

#include "qcavity/geometric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "qcavity/errors.hpp"
#include "qcavity/model.hpp"
#include "qcavity/parallel.hpp"

namespace qcavity {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kGap = 1e-12;
constexpr int kShapeProbes = 64;

double dist(LoopPoint a, LoopPoint b)
{
    return std::max(std::abs(a.theta - b.theta), std::abs(a.phi - b.phi));
}

} // namespace

LoopPath::LoopPath(std::vector<LoopSegment> segments) : segments_(std::move(segments))
{
    if (segments_.empty()) {
        throw InvalidArgument("loop path needs at least one segment");
    }
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        const LoopSegment& seg = segments_[i];
        if (!seg.shape || !(seg.duration > 0.0) || !std::isfinite(seg.duration)) {
            throw InvalidArgument("loop segment " + std::to_string(i)
                                  + " needs a shape and a positive duration");
        }
        for (int k = 0; k <= kShapeProbes; ++k) {
            const LoopPoint pt = seg.shape(double(k) / kShapeProbes);
            if (!(pt.theta >= 0.0 && pt.theta <= kPi) || !std::isfinite(pt.phi)) {
                throw InvalidArgument("loop segment " + std::to_string(i)
                                      + " leaves theta in [0, pi]");
            }
        }
        if (i > 0 && dist(segments_[i - 1].shape(1.0), seg.shape(0.0)) > kGap) {
            throw InvalidArgument("loop segments " + std::to_string(i - 1) + " and "
                                  + std::to_string(i) + " do not join");
        }
        total_ += seg.duration;
    }
    if (std::abs(segments_.front().shape(0.0).theta) > kGap
        || std::abs(segments_.back().shape(1.0).theta) > kGap) {
        throw InvalidArgument("loop path must start and end at theta = 0");
    }
}

LoopPoint LoopPath::point_at(double t) const
{
    t = std::clamp(t, 0.0, total_);
    double start = 0.0;
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        const LoopSegment& seg = segments_[i];
        if (t <= start + seg.duration || i + 1 == segments_.size()) {
            return seg.shape(std::clamp((t - start) / seg.duration, 0.0, 1.0));
        }
        start += seg.duration;
    }
    return segments_.back().shape(1.0);
}

double LoopPath::windings() const
{
    return (segments_.back().shape(1.0).phi - segments_.front().shape(0.0).phi) / (2.0 * kPi);
}

LoopPath standard_loop(double theta0, double T, double ramp_fraction, double windings)
{
    if (!(theta0 > 0.0 && theta0 < kPi)) {
        throw InvalidArgument("standard_loop: theta0 must lie in (0, pi)");
    }
    if (!(T > 0.0) || !std::isfinite(T)) {
        throw InvalidArgument("standard_loop: T must be finite and > 0");
    }
    if (!(ramp_fraction > 0.0 && ramp_fraction < 0.5)) {
        throw InvalidArgument("standard_loop: ramp_fraction must lie in (0, 1/2)");
    }
    if (!(windings != 0.0) || !std::isfinite(windings)) {
        throw InvalidArgument("standard_loop: windings must be finite and nonzero");
    }
    const double sweep = 2.0 * kPi * windings;
    std::vector<LoopSegment> segs;
    segs.push_back({[theta0](double s) {
                        const double r = std::sin(0.5 * kPi * s);
                        return LoopPoint{theta0 * r * r, 0.0};
                    },
                    ramp_fraction * T, "ramp up"});
    // Zero phi velocity at both ends of the sweep, so the drive has no kink
    // where the ramps hand over.
    segs.push_back({[theta0, sweep](double s) {
                        return LoopPoint{theta0, sweep * (s - std::sin(2.0 * kPi * s) / (2.0 * kPi))};
                    },
                    (1.0 - 2.0 * ramp_fraction) * T, "sweep"});
    segs.push_back({[theta0, sweep](double s) {
                        const double r = std::cos(0.5 * kPi * s);
                        return LoopPoint{theta0 * r * r, sweep};
                    },
                    ramp_fraction * T, "ramp down"});
    return LoopPath(std::move(segs));
}

DriveAmplitudes drive_amplitudes(LoopPoint point, double Omega_bar)
{
    return {-Omega_bar * std::sin(0.5 * point.theta) * std::exp(Complex(0.0, point.phi)),
            Complex(Omega_bar * std::cos(0.5 * point.theta), 0.0)};
}

DriveAmplitudes drive_amplitudes(const LoopPath& path, double t, double Omega_bar)
{
    if (!(t >= 0.0 && t <= path.total_time())) {
        throw InvalidArgument("drive_amplitudes: t outside [0, T]");
    }
    return drive_amplitudes(path.point_at(t), Omega_bar);
}

StateVector dark_state(double theta, double phi, const HilbertSpec& spec)
{
    const std::pair<ProductLabel, Complex> terms[] = {
        {{1, 0, 0}, std::cos(0.5 * theta)},
        {{2, 0, 0}, std::sin(0.5 * theta) * std::exp(Complex(0.0, phi))}};
    return superposition(terms, spec);
}

double surface_integral(const LoopPath& path, std::size_t samples)
{
    if (samples < 2) {
        throw InvalidArgument("surface_integral needs at least 2 samples");
    }
    const double T = path.total_time();
    const LoopPoint first = path.point_at(0.0);
    const LoopPoint last = path.point_at(T);
    if (std::abs(first.theta) > kGap || std::abs(last.theta) > kGap) {
        throw InvalidArgument("surface_integral: path is not closed at theta = 0");
    }
    double sum = 0.0;
    LoopPoint prev = first;
    for (std::size_t i = 1; i < samples; ++i) {
        const LoopPoint cur = path.point_at(T * double(i) / double(samples - 1));
        sum += 0.5 * ((1.0 - std::cos(prev.theta)) + (1.0 - std::cos(cur.theta)))
               * (cur.phi - prev.phi);
        prev = cur;
    }
    return sum;
}

HilbertSpec geometric_space() { return HilbertSpec::ions_only({0, 1, 2, 3}); }

BerryReport adiabatic_run(const LoopPath& path, double Omega_bar, const StepControl& ctrl,
                          std::size_t workers)
{
    if (!(Omega_bar > 0.0) || !std::isfinite(Omega_bar)) {
        throw InvalidArgument("adiabatic_run: Omega_bar must be finite and > 0");
    }
    const HilbertSpec spec = geometric_space();
    // H is real-linear in (Omega1, Omega2); four fixed pieces cover every drive.
    const Matrix h1r = geometric_hamiltonian(1.0, 0.0, spec).matrix();
    const Matrix h1i = geometric_hamiltonian(Complex(0.0, 1.0), 0.0, spec).matrix();
    const Matrix h2r = geometric_hamiltonian(0.0, 1.0, spec).matrix();
    const Matrix h2i = geometric_hamiltonian(0.0, Complex(0.0, 1.0), spec).matrix();
    auto hamiltonian = [&, Omega_bar](double t) -> Matrix {
        const DriveAmplitudes d = drive_amplitudes(path.point_at(t), Omega_bar);
        return d.Omega1.real() * h1r + d.Omega1.imag() * h1i + d.Omega2.real() * h2r
               + d.Omega2.imag() * h2i;
    };
    const Generator gen = Generator::driven(spec.dim(), hamiltonian, {}, "H_geometric", Omega_bar);

    BerryReport rep;
    rep.theta0 = 0.0;
    for (const LoopSegment& seg : path.segments()) {
        for (int k = 0; k <= kShapeProbes; ++k) {
            rep.theta0 = std::max(rep.theta0, seg.shape(double(k) / kShapeProbes).theta);
        }
    }
    rep.windings = path.windings();
    rep.total_time = path.total_time();
    rep.Omega_bar = Omega_bar;
    rep.surface_integral = surface_integral(path);
    rep.half_surface_integral = 0.5 * rep.surface_integral;
    rep.adiabatic = Omega_bar * path.total_time() >= 100.0 * std::abs(rep.windings);
    if (!rep.adiabatic) {
        char buf[128];
        std::snprintf(buf, sizeof(buf),
                      "Omega_bar*T = %.6g is below 100 per winding; transport may be diabatic",
                      Omega_bar * path.total_time());
        rep.warning = buf;
    }

    const std::array<ProductLabel, 4> inputs{ProductLabel{1, 0, 0}, ProductLabel{0, 0, 0},
                                             ProductLabel{0, 1, 0}, ProductLabel{1, 1, 0}};
    std::array<Vector, 4> finals;
    double energy_integral = 0.0, max_energy = 0.0;
    std::size_t steps = 0;
    double dt = 0.0;

    auto run = [&](std::size_t k) {
        const StateVector psi0 = basis_state(inputs[k], spec);
        StepControl c = ctrl;
        c.record_every = std::numeric_limits<std::size_t>::max();
        PureObserver observer;
        double prev_t = 0.0, prev_e = 0.0;
        if (k == 0) {
            observer = [&](double t, const Vector& psi) {
                const double e = std::abs(psi.dot(hamiltonian(t) * psi));
                if (t > 0.0) {
                    energy_integral += 0.5 * (prev_e + e) * (t - prev_t);
                }
                max_energy = std::max(max_energy, e);
                prev_t = t;
                prev_e = e;
            };
        }
        const PureTrajectory traj = evolve_schrodinger(psi0, gen, path.total_time(), c, observer);
        finals[k] = traj.states.back().amplitudes();
        if (k == 0) {
            steps = traj.meta.steps;
            dt = traj.meta.dt;
        }
    };
    parallel_for(inputs.size(), workers, run);

    const Vector& psi = finals[0];
    const Complex a10 = psi(Eigen::Index(spec.index({1, 0, 0})));
    const Complex a20 = psi(Eigen::Index(spec.index({2, 0, 0})));
    rep.dt = dt;
    rep.steps = steps;
    rep.numeric_phase = std::arg(a10);
    rep.return_amplitude = std::abs(a10);
    rep.adiabatic_leakage =
        std::clamp(psi.squaredNorm() - std::norm(a10) - std::norm(a20), 0.0, 1.0);
    rep.dynamical_phase_bound = energy_integral;
    rep.max_energy = max_energy;
    for (std::size_t k = 1; k < inputs.size(); ++k) {
        const Complex amp = finals[k](Eigen::Index(spec.index(inputs[k])));
        rep.decoupled[k - 1] = {inputs[k], amp, std::arg(amp)};
    }
    return rep;
}

} // namespace qcavity
