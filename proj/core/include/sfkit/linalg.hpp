// Copyright 2026 The sfkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>

#include <limits>
#include <string_view>

namespace sfkit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Zero test shared by every rank and inertia decision in the toolkit.
///
/// A value x is numerically zero relative to a scale s iff
/// |x| <= abs_zero + rel_zero * s.
struct Tolerance {
  double rel_zero = 1e-9;
  double abs_zero = 1e-12;

  double band(double scale) const { return abs_zero + rel_zero * scale; }
  bool is_zero(double value, double scale) const;

  /// Throws InputError unless both thresholds are strictly positive and finite.
  void validate() const;

  bool operator==(const Tolerance&) const = default;
};

/// Eigendecomposition A = Q diag(values) Q^T, values ascending.
struct SymmetricEigen {
  Vector values;
  Matrix vectors;
};

/// Counts of negative / zero / positive eigenvalues at a given tolerance.
struct Inertia {
  int negative = 0;
  int zero = 0;
  int positive = 0;
  /// Half-width of the zero band that was used.
  double band = 0.0;
  /// Smallest distance of an eigenvalue outside the band to the band edge;
  /// infinity when every eigenvalue sits inside the band.
  double gap = std::numeric_limits<double>::infinity();

  int size() const { return negative + zero + positive; }
};

void require_finite(const Matrix& m, std::string_view what);
void require_square(const Matrix& m, std::string_view what);
/// Square, finite and symmetric within abs_zero + rel_zero * max|a_ij|.
void require_symmetric(const Matrix& m, std::string_view what, const Tolerance& tol = {});

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
SymmetricEigen eig_sym(const Matrix& a, const Tolerance& tol = {});

/// Eigenvalues only (ascending); same rotation sequence as eig_sym without
/// accumulating the eigenvector matrix.
Vector eigvals_sym(const Matrix& a, const Tolerance& tol = {});

/// Generalized pencil A x = lambda M x with M symmetric positive definite.
/// Eigenvectors are M-orthonormal. Throws InputError if M is not SPD.
SymmetricEigen eig_pencil(const Matrix& a, const Matrix& m, const Tolerance& tol = {});
Vector eigvals_pencil(const Matrix& a, const Matrix& m, const Tolerance& tol = {});

/// Inertia of a spectrum; the band is relative to the spectral radius.
Inertia inertia(const Vector& eigenvalues, const Tolerance& tol = {});

/// Singular values in descending order.
Vector singular_values(const Matrix& a);

/// Numerical rank, relative to the largest singular value.
int numerical_rank(const Matrix& a, const Tolerance& tol = {});

/// Orthonormal basis of the column space (rows x rank). A zero or empty input
/// yields a rows x 0 matrix.
Matrix orthonormal_basis(const Matrix& columns, const Tolerance& tol = {});

/// Orthonormal basis of {x : A x = 0}, cols x (cols - rank).
Matrix kernel_basis(const Matrix& a, const Tolerance& tol = {});

/// Spectral norm.
double norm2(const Matrix& a);

/// Symmetric part (A + A^T) / 2.
Matrix symmetrize(const Matrix& a);

}  // namespace sfkit
