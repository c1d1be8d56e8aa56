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

#include "sfkit/forms.hpp"

#include <string>

#include "sfkit/errors.hpp"

namespace sfkit {
namespace {

constexpr Tolerance kSymmetryCheck{1e-10, 1e-12};

Subspace span_of_columns(const Matrix& vectors, const std::vector<Eigen::Index>& cols,
                         const Tolerance& tol) {
  Matrix picked(vectors.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) {
    picked.col(static_cast<Eigen::Index>(k)) = vectors.col(cols[k]);
  }
  return Subspace::span(picked, tol);
}

}  // namespace

SymmetricForm::SymmetricForm(Matrix a, std::optional<Matrix> gram) {
  require_symmetric(a, "symmetric form", kSymmetryCheck);
  a_ = symmetrize(a);
  if (gram) {
    require_symmetric(*gram, "gram matrix", kSymmetryCheck);
    if (gram->rows() != a_.rows()) throw InputError("symmetric form: gram matrix has the wrong size");
    Eigen::LLT<Matrix> llt(*gram);
    if (llt.info() != Eigen::Success) throw InputError("gram matrix is not positive definite");
    gram_ = symmetrize(*gram);
  }
}

Matrix SymmetricForm::gram() const {
  return gram_ ? *gram_ : Matrix::Identity(a_.rows(), a_.cols());
}

Vector SymmetricForm::eigenvalues(const Tolerance& tol) const {
  return gram_ ? eigvals_pencil(a_, *gram_, tol) : eigvals_sym(a_, tol);
}

SymmetricEigen SymmetricForm::eigen(const Tolerance& tol) const {
  return gram_ ? eig_pencil(a_, *gram_, tol) : eig_sym(a_, tol);
}

SpectralSplit spectral_split(const SymmetricForm& b, const Tolerance& tol) {
  const SymmetricEigen e = b.eigen(tol);
  SpectralSplit out;
  out.eigenvalues = e.values;
  out.inertia = inertia(e.values, tol);
  std::vector<Eigen::Index> neg, zero, pos;
  for (Eigen::Index i = 0; i < e.values.size(); ++i) {
    const double lambda = e.values(i);
    if (lambda < -out.inertia.band) {
      neg.push_back(i);
    } else if (lambda > out.inertia.band) {
      pos.push_back(i);
    } else {
      zero.push_back(i);
    }
  }
  out.minus = span_of_columns(e.vectors, neg, tol);
  out.plus = span_of_columns(e.vectors, pos, tol);
  out.kernel = span_of_columns(e.vectors, zero, tol);
  return out;
}

Inertia index_counts(const SymmetricForm& b, const Tolerance& tol) {
  return inertia(b.eigenvalues(tol), tol);
}

int morse_index(const SymmetricForm& b, const Tolerance& tol) {
  return index_counts(b, tol).negative;
}

int coindex(const SymmetricForm& b, const Tolerance& tol) { return index_counts(b, tol).positive; }

int nullity(const SymmetricForm& b, const Tolerance& tol) { return index_counts(b, tol).zero; }

Subspace form_kernel(const SymmetricForm& b, const Tolerance& tol) {
  return spectral_split(b, tol).kernel;
}

SymmetricForm restrict(const SymmetricForm& b, const Subspace& v) {
  if (v.ambient_dim() != b.dim()) {
    throw InputError("restrict: subspace lives in R^" + std::to_string(v.ambient_dim()) +
                     ", form acts on R^" + std::to_string(b.dim()));
  }
  const Matrix& q = v.basis();
  Matrix a = symmetrize(q.transpose() * b.matrix() * q);
  if (b.has_gram()) {
    return SymmetricForm(std::move(a), symmetrize(q.transpose() * b.gram() * q));
  }
  return SymmetricForm(std::move(a));
}

Subspace b_orthocomplement(const SymmetricForm& b, const Subspace& v, const Tolerance& tol) {
  if (v.ambient_dim() != b.dim()) throw InputError("b_orthocomplement: dimension mismatch");
  if (v.dim() == 0) return Subspace::whole(b.dim());
  return Subspace::from_orthonormal(kernel_basis(v.basis().transpose() * b.matrix(), tol));
}

bool is_isotropic(const SymmetricForm& b, const Subspace& z, const Tolerance& tol) {
  if (z.ambient_dim() != b.dim()) throw InputError("is_isotropic: dimension mismatch");
  if (z.dim() == 0) return true;
  const Matrix restricted = z.basis().transpose() * b.matrix() * z.basis();
  return norm2(restricted) <= tol.band(norm2(b.matrix()));
}

IsotropicBounds isotropic_bounds(const SymmetricForm& b, const Subspace& z, const Tolerance& tol) {
  if (!is_isotropic(b, z, tol)) throw InputError("isotropic_bounds: subspace is not isotropic");
  const Inertia counts = index_counts(b, tol);
  IsotropicBounds out;
  out.dim_z = z.dim();
  out.n_minus = counts.negative;
  out.n_plus = counts.positive;
  out.dim_z_cap_kernel = intersect(z, form_kernel(b, tol), tol).dim();
  return out;
}

RestrictionTerms restriction_terms(const SymmetricForm& b, const Subspace& v, const Tolerance& tol) {
  const Subspace complement = b_orthocomplement(b, v, tol);
  RestrictionTerms out;
  out.n_minus_complement = morse_index(restrict(b, complement), tol);
  out.dim_v_cap_complement = intersect(v, complement, tol).dim();
  out.dim_v_cap_kernel = intersect(v, form_kernel(b, tol), tol).dim();
  return out;
}

Subspace embedded_negative_space(const SymmetricForm& b, const Subspace& v, const Tolerance& tol) {
  const SpectralSplit inner = spectral_split(restrict(b, v), tol);
  return Subspace::span(v.basis() * inner.minus.basis(), tol);
}

NegativeSpaceComparison negative_space_relative_dimension(const SymmetricForm& b, const Subspace& v,
                                                          const Tolerance& tol) {
  NegativeSpaceComparison out;
  out.direct = relative_dimension(spectral_split(b, tol).minus, embedded_negative_space(b, v, tol), tol);
  out.terms = restriction_terms(b, v, tol);
  out.formula = out.terms.total();
  return out;
}

}  // namespace sfkit
