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

#include <optional>

#include "sfkit/grassmann.hpp"
#include "sfkit/linalg.hpp"

namespace sfkit {

/// Symmetric bilinear form B(x, y) = x^T A y, optionally paired with a
/// positive-definite Gram matrix M. The represented operator is M^{-1} A and
/// every index count is taken from the pencil (A, M).
class SymmetricForm {
 public:
  SymmetricForm() = default;
  explicit SymmetricForm(Matrix a, std::optional<Matrix> gram = std::nullopt);

  int dim() const { return static_cast<int>(a_.rows()); }
  const Matrix& matrix() const { return a_; }
  bool has_gram() const { return gram_.has_value(); }
  /// The Gram matrix, or the identity when none was given.
  Matrix gram() const;
  const std::optional<Matrix>& gram_if_any() const { return gram_; }

  /// Pencil eigenvalues, ascending.
  Vector eigenvalues(const Tolerance& tol = {}) const;
  SymmetricEigen eigen(const Tolerance& tol = {}) const;

 private:
  Matrix a_;
  std::optional<Matrix> gram_;
};

/// Negative, positive and null spaces of the represented operator.
struct SpectralSplit {
  Subspace minus;
  Subspace plus;
  Subspace kernel;
  Vector eigenvalues;
  Inertia inertia;
};

SpectralSplit spectral_split(const SymmetricForm& b, const Tolerance& tol = {});

Inertia index_counts(const SymmetricForm& b, const Tolerance& tol = {});
int morse_index(const SymmetricForm& b, const Tolerance& tol = {});
int coindex(const SymmetricForm& b, const Tolerance& tol = {});
int nullity(const SymmetricForm& b, const Tolerance& tol = {});

/// Kernel of the represented operator (equals ker A).
Subspace form_kernel(const SymmetricForm& b, const Tolerance& tol = {});

/// B restricted to V x V in the coordinates of V's orthonormal basis.
SymmetricForm restrict(const SymmetricForm& b, const Subspace& v);

/// {x : B(v, x) = 0 for all v in V}.
Subspace b_orthocomplement(const SymmetricForm& b, const Subspace& v, const Tolerance& tol = {});

/// ||Z^T A Z|| <= abs_zero + rel_zero * ||A||.
bool is_isotropic(const SymmetricForm& b, const Subspace& z, const Tolerance& tol = {});

struct IsotropicBounds {
  int dim_z = 0;
  int n_minus = 0;
  int n_plus = 0;
  int dim_z_cap_kernel = 0;

  /// dim Z <= n_-(B) + dim(Z n ker T) and likewise for n_+.
  bool holds() const {
    return dim_z <= n_minus + dim_z_cap_kernel && dim_z <= n_plus + dim_z_cap_kernel;
  }
};

/// Throws InputError when Z is not isotropic.
IsotropicBounds isotropic_bounds(const SymmetricForm& b, const Subspace& z,
                                 const Tolerance& tol = {});

/// Three boundary quantities of a form relative to a subspace V:
/// n_-(B on V^{perp_B}), dim(V n V^{perp_B}), dim(V n ker T).
struct RestrictionTerms {
  int n_minus_complement = 0;
  int dim_v_cap_complement = 0;
  int dim_v_cap_kernel = 0;

  int total() const { return n_minus_complement + dim_v_cap_complement - dim_v_cap_kernel; }
};

RestrictionTerms restriction_terms(const SymmetricForm& b, const Subspace& v,
                                   const Tolerance& tol = {});

struct NegativeSpaceComparison {
  /// relative_dimension(V^-(T), V^-(T~)) with V^-(T~) embedded through V.
  int direct = 0;
  /// restriction_terms(B, V).total().
  int formula = 0;
  RestrictionTerms terms;
};

NegativeSpaceComparison negative_space_relative_dimension(const SymmetricForm& b, const Subspace& v,
                                                          const Tolerance& tol = {});

/// Negative space of the restricted form, pushed forward into the ambient
/// space through V's basis.
Subspace embedded_negative_space(const SymmetricForm& b, const Subspace& v,
                                 const Tolerance& tol = {});

}  // namespace sfkit
