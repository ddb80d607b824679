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

#include "qcavity/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "qcavity/errors.hpp"

namespace qcavity {

namespace {

void check_levels(const std::vector<Level>& levels, int ion)
{
    if (levels.empty()) {
        throw InvalidArgument("ion " + std::to_string(ion) + " has no levels");
    }
    std::set<Level> seen;
    for (Level l : levels) {
        if (l < 0) {
            throw InvalidArgument("negative level label " + std::to_string(l));
        }
        if (!seen.insert(l).second) {
            throw InvalidArgument("duplicate level label " + std::to_string(l) + " on ion "
                                  + std::to_string(ion));
        }
    }
}

Matrix single_transition(const HilbertSpec& spec, int ion, Level i, Level j)
{
    const auto d = Eigen::Index(spec.ion_dim(ion));
    Matrix m = Matrix::Zero(d, d);
    m(Eigen::Index(spec.level_index(ion, i)), Eigen::Index(spec.level_index(ion, j))) = 1.0;
    return m;
}

Operator embed(const Matrix& ion1, const Matrix& ion2, const Matrix& cavity, std::string label)
{
    Operator out = tensor(tensor(Operator(ion1), Operator(ion2)), Operator(cavity));
    return Operator(out.matrix(), std::move(label));
}

} // namespace

HilbertSpec::HilbertSpec(std::vector<Level> ion1_levels, std::vector<Level> ion2_levels,
                         std::optional<int> fock_cutoff)
    : ion1_(std::move(ion1_levels)), ion2_(std::move(ion2_levels)), fock_cutoff_(fock_cutoff)
{
    check_levels(ion1_, 1);
    check_levels(ion2_, 2);
    if (fock_cutoff_ && *fock_cutoff_ < 1) {
        throw InvalidArgument("fock_cutoff must be >= 1, got " + std::to_string(*fock_cutoff_));
    }
    // Computed in double to catch overflow before it happens.
    const double total = double(ion1_.size()) * double(ion2_.size())
                         * (fock_cutoff_ ? double(*fock_cutoff_) + 1.0 : 1.0);
    if (total > double(kMaxDimension)) {
        throw InvalidArgument("composite dimension " + std::to_string(std::size_t(total))
                              + " exceeds limit " + std::to_string(kMaxDimension));
    }
}

HilbertSpec HilbertSpec::with_cavity(std::vector<Level> levels, int fock_cutoff)
{
    return HilbertSpec(levels, levels, fock_cutoff);
}

HilbertSpec HilbertSpec::ions_only(std::vector<Level> levels)
{
    return HilbertSpec(levels, levels, std::nullopt);
}

const std::vector<Level>& HilbertSpec::ion_levels(int ion) const
{
    if (ion == 1) {
        return ion1_;
    }
    if (ion == 2) {
        return ion2_;
    }
    throw InvalidArgument("ion index must be 1 or 2, got " + std::to_string(ion));
}

bool HilbertSpec::has_level(int ion, Level level) const
{
    const auto& levels = ion_levels(ion);
    return std::find(levels.begin(), levels.end(), level) != levels.end();
}

std::size_t HilbertSpec::level_index(int ion, Level level) const
{
    const auto& levels = ion_levels(ion);
    auto it = std::find(levels.begin(), levels.end(), level);
    if (it == levels.end()) {
        throw InvalidArgument("unknown level label " + std::to_string(level) + " on ion "
                              + std::to_string(ion));
    }
    return std::size_t(it - levels.begin());
}

std::size_t HilbertSpec::index(const ProductLabel& label) const
{
    const int n_max = fock_cutoff_.value_or(0);
    if (label.photons < 0 || label.photons > n_max) {
        throw InvalidArgument("photon number " + std::to_string(label.photons)
                              + " outside [0, " + std::to_string(n_max) + "]");
    }
    const std::size_t i1 = level_index(1, label.ion1);
    const std::size_t i2 = level_index(2, label.ion2);
    return (i1 * ion_dim(2) + i2) * cavity_dim() + std::size_t(label.photons);
}

ProductLabel HilbertSpec::label(std::size_t index) const
{
    if (index >= dim()) {
        throw InvalidArgument("composite index " + std::to_string(index) + " out of range");
    }
    const std::size_t n = index % cavity_dim();
    const std::size_t ions = index / cavity_dim();
    return {ion1_[ions / ion_dim(2)], ion2_[ions % ion_dim(2)], int(n)};
}

HilbertSpec HilbertSpec::without_cavity() const
{
    return HilbertSpec(ion1_, ion2_, std::nullopt);
}

//
// Operator
//

Operator::Operator(Matrix entries, std::string label)
    : entries_(std::move(entries)), label_(std::move(label))
{
    if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
        throw InvalidArgument("operator must be square and non-empty, got "
                              + std::to_string(entries_.rows()) + "x"
                              + std::to_string(entries_.cols()));
    }
    if (!entries_.allFinite()) {
        throw InvalidArgument("operator '" + label_ + "' has non-finite entries");
    }
}

Operator Operator::identity(std::size_t dim, std::string label)
{
    return Operator(Matrix::Identity(Eigen::Index(dim), Eigen::Index(dim)), std::move(label));
}

Operator Operator::zero(std::size_t dim, std::string label)
{
    return Operator(Matrix::Zero(Eigen::Index(dim), Eigen::Index(dim)), std::move(label));
}

Operator Operator::adjoint() const
{
    return Operator(entries_.adjoint(), label_ + "^dag");
}

double Operator::hermiticity_error() const
{
    const double scale = std::max(1.0, entries_.cwiseAbs().maxCoeff());
    return (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff() / scale;
}

namespace {
void require_same_dim(const Operator& a, const Operator& b)
{
    if (a.dim() != b.dim()) {
        throw InvalidArgument("operator dimension mismatch: " + std::to_string(a.dim()) + " vs "
                              + std::to_string(b.dim()));
    }
}
} // namespace

Operator operator+(const Operator& a, const Operator& b)
{
    require_same_dim(a, b);
    return Operator(a.matrix() + b.matrix(), a.label() + "+" + b.label());
}

Operator operator-(const Operator& a, const Operator& b)
{
    require_same_dim(a, b);
    return Operator(a.matrix() - b.matrix(), a.label() + "-" + b.label());
}

Operator operator*(const Operator& a, const Operator& b)
{
    require_same_dim(a, b);
    return Operator(a.matrix() * b.matrix(), a.label() + "*" + b.label());
}

Operator operator*(Complex s, const Operator& a)
{
    return Operator(s * a.matrix(), a.label());
}

Operator commutator(const Operator& a, const Operator& b)
{
    require_same_dim(a, b);
    return Operator(a.matrix() * b.matrix() - b.matrix() * a.matrix(),
                    "[" + a.label() + "," + b.label() + "]");
}

//
// States
//

StateVector::StateVector(Vector amplitudes) : amplitudes_(std::move(amplitudes))
{
    if (amplitudes_.size() == 0 || !amplitudes_.allFinite()) {
        throw InvalidArgument("state vector must be non-empty and finite");
    }
    const double norm = amplitudes_.norm();
    if (std::abs(norm - 1.0) > 1e-9) {
        throw InvalidArgument("state vector norm " + std::to_string(norm) + " is not 1");
    }
}

StateVector StateVector::normalized(Vector amplitudes)
{
    const double norm = amplitudes.norm();
    if (!(norm > 0.0)) {
        throw InvalidArgument("cannot normalize a zero vector");
    }
    return StateVector(amplitudes / norm);
}

StateVector StateVector::unchecked(Vector amplitudes)
{
    return StateVector(std::move(amplitudes), NoCheck{});
}

Complex StateVector::overlap(const StateVector& other) const
{
    if (dim() != other.dim()) {
        throw InvalidArgument("state dimension mismatch");
    }
    return amplitudes_.dot(other.amplitudes_);
}

DensityMatrix::DensityMatrix(Matrix entries) : entries_(std::move(entries))
{
    if (entries_.rows() != entries_.cols() || entries_.rows() == 0 || !entries_.allFinite()) {
        throw InvalidArgument("density matrix must be square, non-empty and finite");
    }
    if ((entries_ - entries_.adjoint()).cwiseAbs().maxCoeff() > 1e-9) {
        throw InvalidArgument("density matrix is not Hermitian");
    }
    if (std::abs(entries_.trace() - Complex(1.0)) > 1e-9) {
        throw InvalidArgument("density matrix trace is not 1");
    }
    if (min_eigenvalue() < -1e-8) {
        throw InvalidArgument("density matrix has a negative eigenvalue");
    }
}

DensityMatrix DensityMatrix::pure(const StateVector& psi)
{
    return DensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint(), NoCheck{});
}

DensityMatrix DensityMatrix::unchecked(Matrix entries)
{
    return DensityMatrix(std::move(entries), NoCheck{});
}

double DensityMatrix::purity() const
{
    // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
    return entries_.cwiseAbs2().sum();
}

double DensityMatrix::min_eigenvalue() const
{
    Eigen::SelfAdjointEigenSolver<Matrix> solver(entries_, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

//
// Construction
//

Operator tensor(const Operator& a, const Operator& b)
{
    const double dim = double(a.dim()) * double(b.dim());
    if (dim > double(kMaxDimension)) {
        throw InvalidArgument("tensor product dimension " + std::to_string(a.dim()) + "x"
                              + std::to_string(b.dim()) + " = "
                              + std::to_string(std::size_t(dim)) + " exceeds limit "
                              + std::to_string(kMaxDimension));
    }
    const auto ra = Eigen::Index(a.dim());
    const auto rb = Eigen::Index(b.dim());
    Matrix out(ra * rb, ra * rb);
    for (Eigen::Index i = 0; i < ra; ++i) {
        for (Eigen::Index j = 0; j < ra; ++j) {
            out.block(i * rb, j * rb, rb, rb) = a.matrix()(i, j) * b.matrix();
        }
    }
    std::string label;
    if (!a.label().empty() || !b.label().empty()) {
        label = a.label() + "(x)" + b.label();
    }
    return Operator(std::move(out), std::move(label));
}

Operator annihilation(int n_max)
{
    if (n_max < 1) {
        throw InvalidArgument("annihilation needs n_max >= 1, got " + std::to_string(n_max));
    }
    Matrix a = Matrix::Zero(n_max + 1, n_max + 1);
    for (int n = 1; n <= n_max; ++n) {
        a(n - 1, n) = std::sqrt(double(n));
    }
    return Operator(std::move(a), "a");
}

Operator ion_transition(Level i, Level j, int ion, const HilbertSpec& spec)
{
    const auto d1 = Eigen::Index(spec.ion_dim(1));
    const auto d2 = Eigen::Index(spec.ion_dim(2));
    const auto dc = Eigen::Index(spec.cavity_dim());
    Matrix ion1 = Matrix::Identity(d1, d1);
    Matrix ion2 = Matrix::Identity(d2, d2);
    if (ion == 1) {
        ion1 = single_transition(spec, 1, i, j);
    } else if (ion == 2) {
        ion2 = single_transition(spec, 2, i, j);
    } else {
        throw InvalidArgument("ion index must be 1 or 2, got " + std::to_string(ion));
    }
    return embed(ion1, ion2, Matrix::Identity(dc, dc),
                 "sigma(" + std::to_string(i) + "," + std::to_string(j) + ")@ion"
                     + std::to_string(ion));
}

Operator cavity_annihilation(const HilbertSpec& spec)
{
    if (!spec.has_cavity()) {
        throw InvalidArgument("spec has no cavity mode");
    }
    const auto d1 = Eigen::Index(spec.ion_dim(1));
    const auto d2 = Eigen::Index(spec.ion_dim(2));
    return embed(Matrix::Identity(d1, d1), Matrix::Identity(d2, d2),
                 annihilation(*spec.fock_cutoff()).matrix(), "a@cavity");
}

Operator photon_number(const HilbertSpec& spec)
{
    const Operator a = cavity_annihilation(spec);
    return Operator(a.matrix().adjoint() * a.matrix(), "n@cavity");
}

StateVector basis_state(const ProductLabel& label, const HilbertSpec& spec)
{
    Vector v = Vector::Zero(Eigen::Index(spec.dim()));
    v(Eigen::Index(spec.index(label))) = 1.0;
    return StateVector(std::move(v));
}

StateVector superposition(std::span<const std::pair<ProductLabel, Complex>> terms,
                          const HilbertSpec& spec)
{
    Vector v = Vector::Zero(Eigen::Index(spec.dim()));
    for (const auto& [label, coeff] : terms) {
        v(Eigen::Index(spec.index(label))) += coeff;
    }
    return StateVector::normalized(std::move(v));
}

StateVector phi_state(int sign, const HilbertSpec& spec)
{
    if (sign != 1 && sign != -1) {
        throw InvalidArgument("phi_state sign must be +1 or -1");
    }
    const std::pair<ProductLabel, Complex> terms[] = {{{3, 0, 0}, 1.0},
                                                      {{0, 3, 0}, double(sign)}};
    return superposition(terms, spec);
}

Matrix trace_out_cavity(const Matrix& rho, const HilbertSpec& spec)
{
    if (std::size_t(rho.rows()) != spec.dim() || rho.rows() != rho.cols()) {
        throw InvalidArgument("density matrix does not match spec dimension");
    }
    if (!spec.has_cavity()) {
        return rho;
    }
    const auto ni = Eigen::Index(spec.ions_dim());
    const auto nc = Eigen::Index(spec.cavity_dim());
    Matrix out = Matrix::Zero(ni, ni);
    for (Eigen::Index a = 0; a < ni; ++a) {
        for (Eigen::Index b = 0; b < ni; ++b) {
            Complex s = 0.0;
            for (Eigen::Index n = 0; n < nc; ++n) {
                s += rho(a * nc + n, b * nc + n);
            }
            out(a, b) = s;
        }
    }
    return out;
}

std::string format_complex(Complex z)
{
    char buf[64];
    const double im = z.imag();
    std::snprintf(buf, sizeof(buf), "%.16e%c%.16ej", z.real(), std::signbit(im) ? '-' : '+',
                  std::abs(im));
    return buf;
}

std::string dump_operator(const Operator& op)
{
    std::string out;
    const auto n = Eigen::Index(op.dim());
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j > 0) {
                out += ',';
            }
            out += format_complex(op.matrix()(i, j));
        }
        out += '\n';
    }
    return out;
}

} // namespace qcavity
