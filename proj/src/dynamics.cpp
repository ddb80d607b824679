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

#include "qcavity/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <Eigen/Sparse>

#include "qcavity/errors.hpp"

namespace qcavity {

namespace {

using Sparse = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;
constexpr Complex kI(0.0, 1.0);

Sparse to_sparse(const Matrix& m)
{
    Sparse s = m.sparseView(Complex(0.0), 0.0);
    s.makeCompressed();
    return s;
}

Matrix damping_of(const JumpSet& jumps, std::size_t dim)
{
    Matrix gamma = Matrix::Zero(Eigen::Index(dim), Eigen::Index(dim));
    for (const auto& j : jumps) {
        gamma += j.op.matrix().adjoint() * j.op.matrix();
    }
    return gamma;
}

double inf_norm(const Matrix& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

void check_jump_dims(const JumpSet& jumps, std::size_t dim)
{
    for (const auto& j : jumps) {
        if (j.op.dim() != dim) {
            throw InvalidArgument("jump operator '" + j.label + "' has dimension "
                                  + std::to_string(j.op.dim()) + ", expected "
                                  + std::to_string(dim));
        }
    }
}

std::string at_time(double t)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), " at t = %.17g", t);
    return buf;
}

//
// Right-hand side of the master equation, -i(K rho - rho K†) + sum L rho L†
// with K = H - (i/2) sum L†L. Both products with K are evaluated, so any
// Hermiticity loss of the integrator stays visible to the caller.
//
class MasterKernel {
  public:
    explicit MasterKernel(const Generator& gen) : gen_(gen)
    {
        const std::size_t d = gen.dim();
        damping_ = damping_of(gen.jumps(), d);
        if (!gen.time_dependent()) {
            const Matrix k = gen.hamiltonian(0.0) - 0.5 * kI * damping_;
            k_ = to_sparse(k);
            k_adj_ = to_sparse(k.adjoint());
        }
        for (const auto& j : gen.jumps()) {
            jumps_.push_back(to_sparse(j.op.matrix()));
            jumps_adj_.push_back(to_sparse(j.op.matrix().adjoint()));
        }
        tmp_.resize(Eigen::Index(d), Eigen::Index(d));
    }

    void operator()(double t, const Matrix& rho, Matrix& out)
    {
        if (gen_.time_dependent()) {
            const Matrix k = gen_.hamiltonian(t) - 0.5 * kI * damping_;
            tmp_.noalias() = k * rho;
            out.noalias() = -kI * tmp_;
            tmp_.noalias() = rho * k.adjoint();
            out.noalias() += kI * tmp_;
        } else {
            tmp_.noalias() = k_ * rho;
            out.noalias() = -kI * tmp_;
            tmp_.noalias() = rho * k_adj_;
            out.noalias() += kI * tmp_;
        }
        for (std::size_t i = 0; i < jumps_.size(); ++i) {
            tmp_.noalias() = jumps_[i] * rho;
            out.noalias() += tmp_ * jumps_adj_[i];
        }
    }

  private:
    const Generator& gen_;
    Matrix damping_;
    Sparse k_, k_adj_;
    std::vector<Sparse> jumps_, jumps_adj_;
    Matrix tmp_;
};

// -i K psi, with K = H (Schrodinger) or H - (i/2) sum L†L (no-jump).
class PureKernel {
  public:
    PureKernel(const Generator& gen, bool with_damping) : gen_(gen)
    {
        if (with_damping) {
            damping_ = damping_of(gen.jumps(), gen.dim());
        }
        if (!gen.time_dependent()) {
            Matrix k = gen.hamiltonian(0.0);
            if (with_damping) {
                k -= 0.5 * kI * damping_;
            }
            k_ = to_sparse(k);
        }
    }

    void operator()(double t, const Vector& psi, Vector& out)
    {
        if (gen_.time_dependent()) {
            Matrix k = gen_.hamiltonian(t);
            if (damping_.size() > 0) {
                k -= 0.5 * kI * damping_;
            }
            out.noalias() = -kI * (k * psi);
        } else {
            out.noalias() = -kI * (k_ * psi);
        }
    }

  private:
    const Generator& gen_;
    Matrix damping_;
    Sparse k_;
};

template <class State>
struct Rk4Workspace {
    State k1, k2, k3, k4, stage;
};

template <class State, class Rhs>
void rk4_step(Rhs& f, double t, double dt, State& y, Rk4Workspace<State>& w)
{
    f(t, y, w.k1);
    w.stage = y + (0.5 * dt) * w.k1;
    f(t + 0.5 * dt, w.stage, w.k2);
    w.stage = y + (0.5 * dt) * w.k2;
    f(t + 0.5 * dt, w.stage, w.k3);
    w.stage = y + dt * w.k3;
    f(t + dt, w.stage, w.k4);
    y += (dt / 6.0) * (w.k1 + 2.0 * w.k2 + 2.0 * w.k3 + w.k4);
}

struct StepPlan {
    std::size_t steps = 0;
    double dt = 0.0;
};

StepPlan plan_steps(const Generator& gen, double t_final, const StepControl& ctrl)
{
    if (!(t_final >= 0.0) || !std::isfinite(t_final)) {
        throw InvalidArgument("t_final must be finite and >= 0");
    }
    if (ctrl.dt < 0.0 || !std::isfinite(ctrl.dt) || !(ctrl.trace_tolerance > 0.0)
        || ctrl.record_every == 0) {
        throw InvalidArgument("step control needs dt >= 0, record_every >= 1, tolerance > 0");
    }
    if (t_final == 0.0) {
        return {0, 0.0};
    }
    const double dt_req = ctrl.dt > 0.0 ? ctrl.dt : default_step(gen, t_final);
    const auto steps = std::size_t(std::max(1.0, std::ceil(t_final / dt_req - 1e-9)));
    return {steps, t_final / double(steps)};
}

bool is_sample(std::size_t step, std::size_t steps, std::size_t every)
{
    return step % every == 0 || step == steps;
}

MasterTrajectory run_master(const DensityMatrix& rho0, const Generator& gen, double t_final,
                            std::size_t steps, std::size_t record_every,
                            double trace_tolerance, const MasterObserver* observer)
{
    MasterKernel kernel(gen);
    Rk4Workspace<Matrix> ws;
    Matrix rho = rho0.matrix();
    const double dt = steps > 0 ? t_final / double(steps) : 0.0;

    MasterTrajectory traj;
    traj.meta.generator = gen.label();
    traj.meta.dt = dt;
    traj.meta.steps = steps;
    traj.meta.record_every = record_every;

    auto record = [&](double t) {
        DensityMatrix frame = DensityMatrix::unchecked(rho);
        traj.meta.min_eigenvalue = std::min(traj.meta.min_eigenvalue, frame.min_eigenvalue());
        traj.times.push_back(t);
        traj.states.push_back(std::move(frame));
    };

    record(0.0);
    if (observer && *observer) {
        (*observer)(0.0, rho);
    }
    for (std::size_t step = 1; step <= steps; ++step) {
        const double t0 = t_final * double(step - 1) / double(steps);
        const double t1 = t_final * double(step) / double(steps);
        rk4_step(kernel, t0, dt, rho, ws);

        if (!rho.allFinite()) {
            throw NumericalError("non-finite density matrix entry" + at_time(t1), t1);
        }
        const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
        traj.meta.max_hermiticity_drift = std::max(traj.meta.max_hermiticity_drift, herm);
        rho = 0.5 * (rho + rho.adjoint()).eval();

        const double drift = std::abs(rho.trace() - Complex(1.0));
        traj.meta.max_trace_drift = std::max(traj.meta.max_trace_drift, drift);
        if (drift > trace_tolerance) {
            char buf[96];
            std::snprintf(buf, sizeof(buf), "trace drift %.3e exceeds tolerance %.3e", drift,
                          trace_tolerance);
            throw NumericalError(buf + at_time(t1), t1);
        }
        if (observer && *observer) {
            (*observer)(t1, rho);
        }
        if (is_sample(step, steps, record_every)) {
            record(t1);
        }
    }
    return traj;
}

PureTrajectory run_schrodinger(const StateVector& psi0, const Generator& gen, double t_final,
                               std::size_t steps, std::size_t record_every,
                               double norm_tolerance, const PureObserver* observer)
{
    PureKernel kernel(gen, false);
    Rk4Workspace<Vector> ws;
    Vector psi = psi0.amplitudes();
    const double dt = steps > 0 ? t_final / double(steps) : 0.0;

    PureTrajectory traj;
    traj.meta.generator = gen.label();
    traj.meta.dt = dt;
    traj.meta.steps = steps;
    traj.meta.record_every = record_every;

    // Norm drift is bounded by norm_tolerance and reported in meta.
    auto record = [&](double t) {
        traj.times.push_back(t);
        traj.states.push_back(StateVector::unchecked(psi));
    };

    record(0.0);
    if (observer && *observer) {
        (*observer)(0.0, psi);
    }
    for (std::size_t step = 1; step <= steps; ++step) {
        const double t0 = t_final * double(step - 1) / double(steps);
        const double t1 = t_final * double(step) / double(steps);
        rk4_step(kernel, t0, dt, psi, ws);
        if (!psi.allFinite()) {
            throw NumericalError("non-finite amplitude" + at_time(t1), t1);
        }
        const double drift = std::abs(psi.norm() - 1.0);
        traj.meta.max_trace_drift = std::max(traj.meta.max_trace_drift, drift);
        if (drift > norm_tolerance) {
            char buf[96];
            std::snprintf(buf, sizeof(buf), "norm drift %.3e exceeds tolerance %.3e", drift,
                          norm_tolerance);
            throw NumericalError(buf + at_time(t1), t1);
        }
        if (observer && *observer) {
            (*observer)(t1, psi);
        }
        if (is_sample(step, steps, record_every)) {
            record(t1);
        }
    }
    traj.meta.min_eigenvalue = 0.0;
    return traj;
}

} // namespace

//
// Generator
//

Generator Generator::constant(Operator hamiltonian, JumpSet jumps)
{
    if (!hamiltonian.is_hermitian(1e-10)) {
        throw InvalidArgument("generator Hamiltonian '" + hamiltonian.label()
                              + "' is not Hermitian");
    }
    check_jump_dims(jumps, hamiltonian.dim());
    Generator g;
    g.dim_ = hamiltonian.dim();
    g.label_ = hamiltonian.label();
    g.scale_ = std::max(inf_norm(hamiltonian.matrix()), inf_norm(damping_of(jumps, g.dim_)));
    g.constant_ = std::move(hamiltonian);
    g.jumps_ = std::move(jumps);
    return g;
}

Generator Generator::driven(std::size_t dim, std::function<Matrix(double)> hamiltonian,
                            JumpSet jumps, std::string label, double scale)
{
    if (dim == 0 || !hamiltonian) {
        throw InvalidArgument("driven generator needs a dimension and a callable");
    }
    check_jump_dims(jumps, dim);
    Generator g;
    g.dim_ = dim;
    g.driven_ = std::move(hamiltonian);
    g.label_ = std::move(label);
    g.scale_ = std::max(scale, inf_norm(damping_of(jumps, dim)));
    g.jumps_ = std::move(jumps);
    return g;
}

Matrix Generator::hamiltonian(double t) const
{
    if (constant_) {
        return constant_->matrix();
    }
    Matrix h = driven_(t);
    if (std::size_t(h.rows()) != dim_ || h.rows() != h.cols()) {
        throw InvalidArgument("driven Hamiltonian returned wrong shape");
    }
    return h;
}

double default_step(const Generator& gen, double t_final)
{
    if (gen.rate_scale() > 0.0) {
        return 0.05 / gen.rate_scale();
    }
    return t_final > 0.0 ? t_final : 1.0;
}

std::size_t planned_steps(const Generator& gen, double t_final, const StepControl& ctrl)
{
    return plan_steps(gen, t_final, ctrl).steps;
}

Matrix lindblad_rhs(const DensityMatrix& rho, const Operator& hamiltonian, const JumpSet& jumps)
{
    if (rho.dim() != hamiltonian.dim()) {
        throw InvalidArgument("lindblad_rhs: density matrix and Hamiltonian dimensions differ");
    }
    check_jump_dims(jumps, hamiltonian.dim());
    const Matrix& r = rho.matrix();
    const Matrix& h = hamiltonian.matrix();
    Matrix out = -kI * (h * r - r * h);
    for (const auto& j : jumps) {
        const Matrix& l = j.op.matrix();
        const Matrix ldl = l.adjoint() * l;
        out += l * r * l.adjoint() - 0.5 * (ldl * r + r * ldl);
    }
    return out;
}

MasterTrajectory evolve_master(const DensityMatrix& rho0, const Generator& gen, double t_final,
                               const StepControl& ctrl, const MasterObserver& observer)
{
    if (rho0.dim() != gen.dim()) {
        throw InvalidArgument("evolve_master: initial state dimension "
                              + std::to_string(rho0.dim()) + " does not match generator "
                              + std::to_string(gen.dim()));
    }
    const StepPlan plan = plan_steps(gen, t_final, ctrl);
    MasterTrajectory traj = run_master(rho0, gen, t_final, plan.steps, ctrl.record_every,
                                       ctrl.trace_tolerance, &observer);
    if (ctrl.richardson_check && plan.steps > 0) {
        const MasterTrajectory half = run_master(rho0, gen, t_final, 2 * plan.steps,
                                                 2 * ctrl.record_every, ctrl.trace_tolerance,
                                                 nullptr);
        double delta = 0.0;
        for (std::size_t i = 0; i < std::min(traj.states.size(), half.states.size()); ++i) {
            delta = std::max(delta, trace_distance(traj.states[i].matrix(),
                                                   half.states[i].matrix()));
        }
        traj.meta.richardson_delta = delta;
    }
    return traj;
}

PureTrajectory evolve_schrodinger(const StateVector& psi0, const Generator& gen, double t_final,
                                  const StepControl& ctrl, const PureObserver& observer)
{
    if (psi0.dim() != gen.dim()) {
        throw InvalidArgument("evolve_schrodinger: initial state dimension "
                              + std::to_string(psi0.dim()) + " does not match generator "
                              + std::to_string(gen.dim()));
    }
    const StepPlan plan = plan_steps(gen, t_final, ctrl);
    PureTrajectory traj = run_schrodinger(psi0, gen, t_final, plan.steps, ctrl.record_every,
                                          ctrl.trace_tolerance, &observer);
    if (ctrl.richardson_check && plan.steps > 0) {
        const PureTrajectory half = run_schrodinger(psi0, gen, t_final, 2 * plan.steps,
                                                    2 * ctrl.record_every,
                                                    ctrl.trace_tolerance, nullptr);
        double delta = 0.0;
        for (std::size_t i = 0; i < std::min(traj.states.size(), half.states.size()); ++i) {
            delta = std::max(delta, (traj.states[i].amplitudes() - half.states[i].amplitudes())
                                        .norm());
        }
        traj.meta.richardson_delta = delta;
    }
    return traj;
}

Vector propagate_no_jump(const Vector& psi0, const Generator& gen, double t_final,
                         const StepControl& ctrl)
{
    if (std::size_t(psi0.size()) != gen.dim()) {
        throw InvalidArgument("propagate_no_jump: dimension mismatch");
    }
    const StepPlan plan = plan_steps(gen, t_final, ctrl);
    PureKernel kernel(gen, true);
    Rk4Workspace<Vector> ws;
    Vector psi = psi0;
    for (std::size_t step = 1; step <= plan.steps; ++step) {
        const double t0 = t_final * double(step - 1) / double(plan.steps);
        rk4_step(kernel, t0, plan.dt, psi, ws);
        if (!psi.allFinite()) {
            const double t1 = t_final * double(step) / double(plan.steps);
            throw NumericalError("non-finite amplitude" + at_time(t1), t1);
        }
    }
    return psi;
}

Operator propagator_oracle(const Operator& hamiltonian, double t)
{
    if (!hamiltonian.is_hermitian(1e-10)) {
        throw InvalidArgument("propagator_oracle needs a Hermitian Hamiltonian");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hamiltonian.matrix());
    const Eigen::VectorXd& w = solver.eigenvalues();
    Vector phases(w.size());
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        phases(i) = std::exp(Complex(0.0, -w(i) * t));
    }
    const Matrix& v = solver.eigenvectors();
    return Operator(v * phases.asDiagonal() * v.adjoint(), "exp(-i t " + hamiltonian.label() + ")");
}

namespace {

Matrix psd_sqrt(const Matrix& m)
{
    Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
    Eigen::VectorXd w = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const Matrix& v = solver.eigenvectors();
    return v * w.cast<Complex>().asDiagonal() * v.adjoint();
}

void check_state(const Matrix& m, const char* name)
{
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw InvalidArgument(std::string("state_metrics: ") + name + " is not square");
    }
    if (std::abs(m.trace() - Complex(1.0)) > 1e-6) {
        throw InvalidArgument(std::string("state_metrics: ") + name + " does not have unit trace");
    }
}

} // namespace

double trace_distance(const Matrix& x, const Matrix& y)
{
    if (x.rows() != y.rows() || x.cols() != y.cols()) {
        throw InvalidArgument("trace_distance: dimension mismatch");
    }
    const Matrix diff = x - y;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (diff + diff.adjoint()),
                                                 Eigen::EigenvaluesOnly);
    return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

StateMetrics state_metrics(const Matrix& x, const Matrix& y)
{
    check_state(x, "x");
    check_state(y, "y");
    if (x.rows() != y.rows()) {
        throw InvalidArgument("state_metrics: dimension mismatch");
    }
    const Matrix sx = psd_sqrt(x);
    const Matrix inner = sx * y * sx;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (inner + inner.adjoint()),
                                                 Eigen::EigenvaluesOnly);
    // Eigenvalues at rounding level are dropped: their square roots would
    // otherwise add ~1e-8 per rank-deficient direction.
    const Eigen::VectorXd& w = solver.eigenvalues();
    const double floor = 64.0 * std::numeric_limits<double>::epsilon()
                         * std::max(1.0, w.cwiseAbs().maxCoeff()) * double(w.size());
    double root_sum = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        if (w(i) > floor) {
            root_sum += std::sqrt(w(i));
        }
    }

    StateMetrics m;
    m.fidelity = std::min(1.0, root_sum * root_sum);
    m.trace_distance = trace_distance(x, y);
    m.purity = x.cwiseAbs2().sum();
    return m;
}

StateMetrics state_metrics(const DensityMatrix& x, const DensityMatrix& y)
{
    return state_metrics(x.matrix(), y.matrix());
}

StateMetrics state_metrics(const StateVector& x, const StateVector& y)
{
    return state_metrics(DensityMatrix::pure(x).matrix(), DensityMatrix::pure(y).matrix());
}

std::string trajectory_csv(const std::vector<std::string>& labels,
                           const std::vector<double>& times,
                           const std::vector<std::vector<double>>& rows)
{
    if (times.size() != rows.size()) {
        throw InvalidArgument("trajectory_csv: times and rows differ in length");
    }
    std::string out = "t";
    for (const auto& l : labels) {
        out += ',';
        out += l;
    }
    out += '\n';
    char buf[32];
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (rows[i].size() != labels.size()) {
            throw InvalidArgument("trajectory_csv: row width does not match header");
        }
        std::snprintf(buf, sizeof(buf), "%.17g", times[i]);
        out += buf;
        for (double v : rows[i]) {
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            out += ',';
            out += buf;
        }
        out += '\n';
    }
    return out;
}

} // namespace qcavity
