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

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qcavity {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Desk-scale guard on composite dimensions.
inline constexpr std::size_t kMaxDimension = 10000;

// Ion levels are the physical labels 0, 1, 2, 3 (3 is the excited state),
// not contiguous indices.
using Level = int;

// |ion1 level, ion2 level, photon number>. photons must be 0 on an
// ions-only space.
struct ProductLabel {
    Level ion1 = 0;
    Level ion2 = 0;
    int photons = 0;

    bool operator==(const ProductLabel&) const = default;
};

//
// Composite space of two multilevel ions and an optional truncated cavity
// mode. Subsystem order is fixed: (ion1, ion2, cavity); every composite
// index in the library is derived from that order.
//
class HilbertSpec {
  public:
    HilbertSpec(std::vector<Level> ion1_levels, std::vector<Level> ion2_levels,
                std::optional<int> fock_cutoff);

    // Both ions share `levels`; cavity truncated at n_max = fock_cutoff.
    static HilbertSpec with_cavity(std::vector<Level> levels, int fock_cutoff);
    // Two ions, no cavity factor (effective models after elimination).
    static HilbertSpec ions_only(std::vector<Level> levels);

    const std::vector<Level>& ion_levels(int ion) const;
    std::optional<int> fock_cutoff() const { return fock_cutoff_; }
    bool has_cavity() const { return fock_cutoff_.has_value(); }

    std::size_t ion_dim(int ion) const { return ion_levels(ion).size(); }
    std::size_t cavity_dim() const { return fock_cutoff_ ? std::size_t(*fock_cutoff_ + 1) : 1; }
    std::size_t ions_dim() const { return ion_dim(1) * ion_dim(2); }
    std::size_t dim() const { return ions_dim() * cavity_dim(); }

    bool has_level(int ion, Level level) const;
    // Throws InvalidArgument naming the label when it is not on `ion`.
    std::size_t level_index(int ion, Level level) const;

    std::size_t index(const ProductLabel& label) const;
    ProductLabel label(std::size_t index) const;

    // Same ions without the cavity factor.
    HilbertSpec without_cavity() const;

    bool operator==(const HilbertSpec&) const = default;

  private:
    std::vector<Level> ion1_;
    std::vector<Level> ion2_;
    std::optional<int> fock_cutoff_;
};

// Dense complex square matrix with a free-form provenance label.
class Operator {
  public:
    // Throws InvalidArgument if `entries` is not square or has non-finite
    // entries.
    explicit Operator(Matrix entries, std::string label = {});

    static Operator identity(std::size_t dim, std::string label = "I");
    static Operator zero(std::size_t dim, std::string label = "0");

    std::size_t dim() const { return std::size_t(entries_.rows()); }
    const Matrix& matrix() const { return entries_; }
    const std::string& label() const { return label_; }
    Complex operator()(std::size_t row, std::size_t col) const
    {
        return entries_(Eigen::Index(row), Eigen::Index(col));
    }

    Operator adjoint() const;
    // Max-entry deviation from Hermitian, relative to max(1, max|entry|).
    double hermiticity_error() const;
    bool is_hermitian(double tol = 1e-12) const { return hermiticity_error() <= tol; }

  private:
    Matrix entries_;
    std::string label_;
};

Operator operator+(const Operator& a, const Operator& b);
Operator operator-(const Operator& a, const Operator& b);
Operator operator*(const Operator& a, const Operator& b);
Operator operator*(Complex s, const Operator& a);
Operator commutator(const Operator& a, const Operator& b);

// Pure state; norm is 1 within 1e-9.
class StateVector {
  public:
    explicit StateVector(Vector amplitudes);
    // Rescales to unit norm; throws on a zero vector.
    static StateVector normalized(Vector amplitudes);
    // Skips the norm check; the dynamics engine records frames this way and
    // reports the norm drift separately.
    static StateVector unchecked(Vector amplitudes);

    std::size_t dim() const { return std::size_t(amplitudes_.size()); }
    const Vector& amplitudes() const { return amplitudes_; }
    Complex operator[](std::size_t i) const { return amplitudes_(Eigen::Index(i)); }
    // <this|other>
    Complex overlap(const StateVector& other) const;

  private:
    struct NoCheck {};
    StateVector(Vector amplitudes, NoCheck) : amplitudes_(std::move(amplitudes)) {}
    Vector amplitudes_;
};

// Hermitian, unit trace, min eigenvalue >= -1e-8 (checked on construction).
class DensityMatrix {
  public:
    explicit DensityMatrix(Matrix entries);
    static DensityMatrix pure(const StateVector& psi);
    // Skips validation; for frames whose invariants the caller has already
    // monitored (the dynamics engine).
    static DensityMatrix unchecked(Matrix entries);

    std::size_t dim() const { return std::size_t(entries_.rows()); }
    const Matrix& matrix() const { return entries_; }
    Complex trace() const { return entries_.trace(); }
    double purity() const;
    double min_eigenvalue() const;

  private:
    struct NoCheck {};
    DensityMatrix(Matrix entries, NoCheck) : entries_(std::move(entries)) {}
    Matrix entries_;
};

// Kronecker product in (A, B) order. Rejects results above kMaxDimension.
Operator tensor(const Operator& a, const Operator& b);

// (n_max + 1)-dimensional lowering operator, a|n> = sqrt(n)|n-1>.
Operator annihilation(int n_max);

// |i><j| on `ion` (1 or 2), identity on the other ion and the cavity.
Operator ion_transition(Level i, Level j, int ion, const HilbertSpec& spec);

// Cavity lowering operator embedded in the composite space.
Operator cavity_annihilation(const HilbertSpec& spec);
// a†a embedded; throws when the space has no cavity.
Operator photon_number(const HilbertSpec& spec);

StateVector basis_state(const ProductLabel& label, const HilbertSpec& spec);
// Normalized sum of coefficient * basis_state(label).
StateVector superposition(std::span<const std::pair<ProductLabel, Complex>> terms,
                          const HilbertSpec& spec);

// (|30> + sign|03>)/sqrt(2) with vacuum cavity; sign is +1 or -1.
StateVector phi_state(int sign, const HilbertSpec& spec);

// Partial trace over the cavity. Returns the input unchanged on an
// ions-only spec.
Matrix trace_out_cavity(const Matrix& rho, const HilbertSpec& spec);

// Text dump: one row per line, entries `re+imj` in 17-significant-digit
// scientific notation, comma-separated.
std::string format_complex(Complex z);
std::string dump_operator(const Operator& op);

} // namespace qcavity
