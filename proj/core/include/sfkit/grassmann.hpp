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

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "sfkit/linalg.hpp"

namespace sfkit {

/// Linear subspace of R^N held by an orthonormal basis (N x k, k may be 0).
/// Immutable; every set operation returns a fresh value.
class Subspace {
 public:
  Subspace() = default;

  /// Span of arbitrary columns, orthonormalized at `tol`.
  static Subspace span(const Matrix& columns, const Tolerance& tol = {});
  /// Takes ownership of a basis that is already orthonormal (checked).
  static Subspace from_orthonormal(Matrix basis);
  static Subspace whole(int ambient_dim);
  static Subspace zero(int ambient_dim);

  int ambient_dim() const { return ambient_dim_; }
  int dim() const { return static_cast<int>(basis_.cols()); }
  int codim() const { return ambient_dim_ - dim(); }
  const Matrix& basis() const { return basis_; }

 private:
  Subspace(Matrix basis, int ambient_dim) : basis_(std::move(basis)), ambient_dim_(ambient_dim) {}

  Matrix basis_;
  int ambient_dim_ = 0;
};

Matrix projection(const Subspace& v);

Subspace sum(const Subspace& v, const Subspace& w, const Tolerance& tol = {});
Subspace intersect(const Subspace& v, const Subspace& w, const Tolerance& tol = {});
Subspace orthocomplement(const Subspace& v, const Tolerance& tol = {});
/// Image of a subspace under a linear map of the ambient space.
Subspace image(const Matrix& map, const Subspace& v, const Tolerance& tol = {});

/// dim(V n W) - codim(V + W).
int fredholm_pair_index(const Subspace& v, const Subspace& w, const Tolerance& tol = {});

/// Index of P_{V^perp} restricted to W, seen as a map W -> V^perp.
int projection_restriction_index(const Subspace& v, const Subspace& w,
                                 const Tolerance& tol = {});

/// dim(V n W^perp) - dim(W n V^perp).
int relative_dimension(const Subspace& v, const Subspace& w, const Tolerance& tol = {});

/// Kato's minimal gap gamma(V, W): smallest singular value of P_{V^perp}
/// on the part of W orthogonal to V n W. Equals 1 when W is contained in V
/// (empty infimum).
double kato_gamma(const Subspace& v, const Subspace& w, const Tolerance& tol = {});

/// ||P_V - P_W|| in the operator 2-norm.
double gap_distance(const Subspace& v, const Subspace& w);

/// Orthogonal projection onto {(x, Lx)} in R^{cols(L)} (+) R^{rows(L)}, using
/// (I + L L^T)^{-1}.
Matrix graph_projection(const Matrix& l);

/// Sampled family t -> V_t. An optional generator lets lift_path refine
/// intervals whose projection gap is too large.
struct SubspacePath {
  std::vector<double> times;
  std::vector<Subspace> subspaces;
  std::function<Subspace(double)> generator;

  static SubspacePath sample(std::function<Subspace(double)> generator, double a, double b,
                             int intervals);
  void validate() const;
};

struct LiftOptions {
  /// Target bound for consecutive projection gaps after refinement.
  double max_gap = 0.9;
  /// Maximum bisection depth per original interval.
  int max_bisections = 20;
};

/// Path of orthogonal maps with phi[i] (W_ref) = V_{times[i]}.
struct LiftedPath {
  std::vector<double> times;
  std::vector<Matrix> phi;
  Subspace reference;
  /// Number of intermediate samples inserted by refinement.
  int refinements = 0;

  /// Map at an original sample time (exact match required).
  const Matrix& at(double t) const;
};

/// Kato's direct rotation taking range(P) onto range(Q); requires ||P - Q|| < 1.
Matrix kato_rotation(const Matrix& p, const Matrix& q, const Tolerance& tol = {});

/// Lifts a subspace path to orthogonal maps starting at `initial`; the
/// reference subspace is initial^T (V_{t_0}).
LiftedPath lift_path(const SubspacePath& path, const Matrix& initial, const LiftOptions& options = {},
                     const Tolerance& tol = {});

/// Self-adjoint involution of R^N.
class SymmetryOperator {
 public:
  explicit SymmetryOperator(Matrix m);
  static SymmetryOperator from_positive_space(const Subspace& w);

  const Matrix& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }
  Subspace positive_space(const Tolerance& tol = {}) const;

 private:
  Matrix m_;
};

struct SymmetryConjugation {
  /// u[i] J_i u[i]^T = J for every grid index.
  std::vector<Matrix> u;
  SymmetryOperator constant;
};

SymmetryConjugation conjugate_symmetries_to_constant(std::span<const SymmetryOperator> symmetries,
                                                     const LiftOptions& options = {},
                                                     const Tolerance& tol = {});

}  // namespace sfkit
