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

#include "qcavity/gate.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "qcavity/errors.hpp"
#include "qcavity/parallel.hpp"

namespace qcavity {

namespace {

const char* const kInputNames[4] = {"|00>", "|01>", "|10>", "|11>"};

Vector phases(const Operator& bare, double t)
{
    const Matrix& h0 = bare.matrix();
    if ((h0 - Matrix(h0.diagonal().asDiagonal())).cwiseAbs().maxCoeff() != 0.0) {
        throw InvalidArgument("interaction picture needs a diagonal bare Hamiltonian");
    }
    Vector out(h0.rows());
    for (Eigen::Index i = 0; i < h0.rows(); ++i) {
        out(i) = std::exp(Complex(0.0, h0(i, i).real() * t));
    }
    return out;
}

struct ColumnResult {
    Vector amplitudes = Vector::Zero(4);
    double leakage = 0.0;
    double dt = 0.0;
    std::size_t steps = 0;
};

} // namespace

Matrix ideal_phase_gate()
{
    Matrix u = Matrix::Identity(4, 4);
    u(2, 2) = -1.0;
    return u;
}

double gate_time(double Omega)
{
    if (!(Omega > 0.0) || !std::isfinite(Omega)) {
        throw InvalidArgument("gate time needs Omega > 0");
    }
    return std::numbers::pi * std::sqrt(2.0) / Omega;
}

double gate_fidelity(const Matrix& extracted, const Matrix& ideal)
{
    if (extracted.rows() != 4 || extracted.cols() != 4 || ideal.rows() != 4
        || ideal.cols() != 4) {
        throw InvalidArgument("gate_fidelity works on 4x4 matrices");
    }
    if ((ideal.adjoint() * ideal - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() > 1e-10) {
        throw InvalidArgument("gate_fidelity: ideal gate is not unitary");
    }
    return std::norm((ideal.adjoint() * extracted).trace()) / 16.0;
}

Matrix to_interaction_picture(const Matrix& rho, const Operator& bare, double t)
{
    const Vector u = phases(bare, t);
    return u.asDiagonal() * rho * u.conjugate().asDiagonal();
}

Vector to_interaction_picture(const Vector& psi, const Operator& bare, double t)
{
    return phases(bare, t).cwiseProduct(psi);
}

GateReport extract_gate(Model model, const SystemParams& p, double t_gate,
                        const GateOptions& opt)
{
    if (model == Model::Geometric) {
        throw InvalidArgument("extract_gate: the geometric model runs through adiabatic_run");
    }
    if (!(t_gate > 0.0) || !std::isfinite(t_gate)) {
        throw InvalidArgument("extract_gate: t_gate must be finite and > 0");
    }
    const ModelInstance inst = build_model(model, p, opt.fock_cutoff);
    const Generator gen = Generator::constant(inst.hamiltonian, inst.jumps);
    const bool dissipative = !inst.jumps.empty();

    std::array<std::size_t, 4> comp{};
    for (std::size_t k = 0; k < 4; ++k) {
        comp[k] = inst.spec.index(kComputationalBasis[k]);
    }
    auto outside = [&](const Eigen::VectorXd& populations) {
        double total = populations.sum();
        for (std::size_t idx : comp) {
            total -= populations(Eigen::Index(idx));
        }
        return std::max(0.0, total);
    };

    std::array<ColumnResult, 4> cols;
    auto run_column = [&](std::size_t k) {
        const StateVector psi0 = basis_state(kComputationalBasis[k], inst.spec);
        ColumnResult& out = cols[k];
        try {
            Vector final_state;
            if (!dissipative) {
                StepControl ctrl = opt.ctrl;
                ctrl.record_every = std::numeric_limits<std::size_t>::max();
                const PureTrajectory traj = evolve_schrodinger(psi0, gen, t_gate, ctrl);
                final_state = traj.states.back().amplitudes();
                out.dt = traj.meta.dt;
                out.steps = traj.meta.steps;
                out.leakage = outside(final_state.cwiseAbs2());
            } else {
                final_state = propagate_no_jump(psi0.amplitudes(), gen, t_gate, opt.ctrl);
                StepControl ctrl = opt.ctrl;
                ctrl.record_every = std::numeric_limits<std::size_t>::max();
                const MasterTrajectory traj = evolve_master(DensityMatrix::pure(psi0), gen,
                                                            t_gate, ctrl);
                out.dt = traj.meta.dt;
                out.steps = traj.meta.steps;
                out.leakage = outside(traj.states.back().matrix().diagonal().real());
            }
            const Vector frame = to_interaction_picture(final_state, inst.bare, t_gate);
            for (std::size_t r = 0; r < 4; ++r) {
                out.amplitudes(Eigen::Index(r)) = frame(Eigen::Index(comp[r]));
            }
        } catch (const NumericalError& e) {
            throw NumericalError(std::string("input ") + kInputNames[k] + ": " + e.what(),
                                 e.time());
        }
    };
    parallel_for(4, opt.workers, run_column);

    GateReport report;
    report.model = model;
    report.params = p;
    report.fock_cutoff = inst.spec.fock_cutoff();
    report.t_gate = t_gate;
    report.dt = cols[0].dt;
    report.steps = cols[0].steps;
    report.dissipative = dissipative;
    report.extracted = Matrix::Zero(4, 4);
    for (std::size_t k = 0; k < 4; ++k) {
        report.extracted.col(Eigen::Index(k)) = cols[k].amplitudes;
        report.leakage[k] = std::min(1.0, cols[k].leakage);
    }
    report.fidelity = gate_fidelity(report.extracted, ideal_phase_gate());
    report.phase_10 = std::arg(report.extracted(2, 2));
    return report;
}

std::string_view to_string(ScanAxis axis)
{
    switch (axis) {
    case ScanAxis::Delta:
        return "Delta";
    case ScanAxis::Kappa:
        return "kappa";
    case ScanAxis::Tau:
        return "tau";
    case ScanAxis::Omega:
        return "Omega";
    case ScanAxis::FockCutoff:
        return "fock_cutoff";
    }
    return "?";
}

ScanAxis parse_scan_axis(std::string_view name)
{
    for (ScanAxis a : {ScanAxis::Delta, ScanAxis::Kappa, ScanAxis::Tau, ScanAxis::Omega,
                       ScanAxis::FockCutoff}) {
        if (to_string(a) == name) {
            return a;
        }
    }
    throw InvalidArgument("unknown scan axis '" + std::string(name)
                          + "' (expected Delta, kappa, tau, Omega or fock_cutoff)");
}

SystemParams apply_axis(const SystemParams& fixed, ScanAxis axis, double value,
                        const ScanOptions& opt)
{
    SystemParams p = fixed;
    switch (axis) {
    case ScanAxis::Delta:
        p.omega_c = value + p.omega3 - p.omega0;
        break;
    case ScanAxis::Kappa:
        p.kappa = value;
        break;
    case ScanAxis::Tau:
        p.tau = value;
        break;
    case ScanAxis::Omega:
        p.Omega = value;
        break;
    case ScanAxis::FockCutoff:
        break;
    }
    if (opt.omega_ratio) {
        if (axis == ScanAxis::Omega) {
            throw InvalidArgument("omega_ratio cannot be combined with an Omega scan");
        }
        p.Omega = *opt.omega_ratio * p.dispersive_shift();
    }
    return p;
}

std::vector<ScanRow> regime_scan(ScanAxis axis, const std::vector<double>& values,
                                 const SystemParams& fixed, Model model,
                                 const ScanOptions& opt)
{
    if (values.empty()) {
        throw InvalidArgument("regime_scan: values must not be empty");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
            throw InvalidArgument("regime_scan: values must be finite and positive");
        }
        if (i > 0 && !(values[i] > values[i - 1])) {
            throw InvalidArgument("regime_scan: values must be strictly increasing");
        }
        if (axis == ScanAxis::FockCutoff && values[i] != std::floor(values[i])) {
            throw InvalidArgument("regime_scan: fock_cutoff values must be integers");
        }
    }
    if (opt.omega_ratio && axis == ScanAxis::Omega) {
        throw InvalidArgument("regime_scan: omega_ratio cannot be combined with an Omega scan");
    }
    if (axis == ScanAxis::FockCutoff && model != Model::Full) {
        throw InvalidArgument("regime_scan: fock_cutoff axis needs the full model");
    }

    std::vector<ScanRow> rows(values.size());
    auto run_point = [&](std::size_t i) {
        ScanRow& row = rows[i];
        row.axis_value = values[i];
        try {
            const SystemParams p = apply_axis(fixed, axis, values[i], opt);
            GateOptions gate = opt.gate;
            gate.workers = 1;
            if (axis == ScanAxis::FockCutoff) {
                gate.fock_cutoff = int(values[i]);
            }
            const double t = opt.t_gate ? *opt.t_gate : gate_time(p.Omega);
            const GateReport rep = extract_gate(model, p, t, gate);
            row.fidelity = rep.fidelity;
            row.leakage = rep.leakage;
            row.phase_10 = rep.phase_10;
            row.ok = true;
        } catch (const NumericalError& e) {
            row.ok = false;
            row.error = e.what();
        }
    };
    parallel_for(values.size(), opt.gate.workers, run_point);
    return rows;
}

std::string scan_csv(const std::vector<ScanRow>& rows)
{
    std::string out = "axis_value,fidelity,leak00,leak01,leak10,leak11,phase_10,status\n";
    char buf[32];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out += buf;
        out += ',';
    };
    for (const ScanRow& r : rows) {
        put(r.axis_value);
        if (r.ok) {
            put(r.fidelity);
            for (double l : r.leakage) {
                put(l);
            }
            put(r.phase_10);
            out += "ok\n";
        } else {
            out += "nan,nan,nan,nan,nan,nan,failed\n";
        }
    }
    return out;
}

} // namespace qcavity
