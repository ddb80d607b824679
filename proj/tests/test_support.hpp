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

// Test-only helpers: seeded random generators and small independent oracles
// that do not go through the library's construction paths.

#include <cmath>
#include <random>

#include "qcavity/hilbert.hpp"

namespace qcavity::testing {

inline Matrix random_matrix(std::mt19937_64& rng, Eigen::Index n, double scale = 1.0)
{
    std::normal_distribution<double> dist(0.0, scale);
    Matrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            m(i, j) = Complex(dist(rng), dist(rng));
        }
    }
    return m;
}

// Hermitian with spectral norm exactly `norm`.
inline Matrix random_hermitian(std::mt19937_64& rng, Eigen::Index n, double norm = 1.0)
{
    Matrix a = random_matrix(rng, n);
    Matrix h = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h, Eigen::EigenvaluesOnly);
    const double current = solver.eigenvalues().cwiseAbs().maxCoeff();
    return h * (norm / current);
}

inline Vector random_unit_vector(std::mt19937_64& rng, Eigen::Index n)
{
    std::normal_distribution<double> dist;
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        v(i) = Complex(dist(rng), dist(rng));
    }
    return v / v.norm();
}

inline Matrix random_density(std::mt19937_64& rng, Eigen::Index n)
{
    Matrix a = random_matrix(rng, n);
    Matrix rho = a * a.adjoint();
    return rho / rho.trace().real();
}

// Kronecker product by the index formula (A(x)B)[i*p+k, j*q+l] = A[i,j] B[k,l].
inline Matrix kron_by_index(const Matrix& a, const Matrix& b)
{
    const Eigen::Index p = b.rows();
    Matrix out(a.rows() * p, a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            for (Eigen::Index k = 0; k < p; ++k)
                for (Eigen::Index l = 0; l < b.cols(); ++l)
                    out(i * p + k, j * b.cols() + l) = a(i, j) * b(k, l);
    return out;
}

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

// Rotation of |10> <-> |phi-> with coupling Omega/sqrt2: the closed-form
// two-level Rabi solution.
inline double rabi_transfer(double Omega, double t)
{
    const double s = std::sin(Omega * t / std::sqrt(2.0));
    return s * s;
}

} // namespace qcavity::testing
