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

#include "sfkit/grassmann.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "sfkit/errors.hpp"

namespace sfkit {
namespace {

void require_same_ambient(const Subspace& v, const Subspace& w, const char* op) {
  if (v.ambient_dim() != w.ambient_dim()) {
    std::ostringstream msg;
    msg << op << ": ambient dimensions differ (" << v.ambient_dim() << " vs " << w.ambient_dim()
        << ")";
    throw InputError(msg.str());
  }
}

void require_orthogonal(const Matrix& m, double tolerance, const char* what) {
  require_square(m, what);
  require_finite(m, what);
  const Eigen::Index n = m.rows();
  if ((m.transpose() * m - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() > tolerance) {
    throw InputError(std::string(what) + ": matrix is not orthogonal");
  }
}

}  // namespace

Subspace Subspace::span(const Matrix& columns, const Tolerance& tol) {
  return Subspace(orthonormal_basis(columns, tol), static_cast<int>(columns.rows()));
}

Subspace Subspace::from_orthonormal(Matrix basis) {
  require_finite(basis, "subspace basis");
  const Eigen::Index k = basis.cols();
  const double limit = 1e-10 * static_cast<double>(std::max<Eigen::Index>(k, 1));
  if (k > 0 && (basis.transpose() * basis - Matrix::Identity(k, k)).cwiseAbs().maxCoeff() > limit) {
    throw InputError("subspace basis is not orthonormal");
  }
  const int n = static_cast<int>(basis.rows());
  return Subspace(std::move(basis), n);
}

Subspace Subspace::whole(int ambient_dim) {
  return Subspace(Matrix::Identity(ambient_dim, ambient_dim), ambient_dim);
}

Subspace Subspace::zero(int ambient_dim) { return Subspace(Matrix(ambient_dim, 0), ambient_dim); }

Matrix projection(const Subspace& v) { return v.basis() * v.basis().transpose(); }

Subspace sum(const Subspace& v, const Subspace& w, const Tolerance& tol) {
  require_same_ambient(v, w, "sum");
  Matrix joined(v.ambient_dim(), v.dim() + w.dim());
  joined << v.basis(), w.basis();
  return Subspace::span(joined, tol);
}

Subspace orthocomplement(const Subspace& v, const Tolerance& tol) {
  if (v.dim() == 0) return Subspace::whole(v.ambient_dim());
  return Subspace::from_orthonormal(kernel_basis(v.basis().transpose(), tol));
}

Subspace intersect(const Subspace& v, const Subspace& w, const Tolerance& tol) {
  require_same_ambient(v, w, "intersect");
  return orthocomplement(sum(orthocomplement(v, tol), orthocomplement(w, tol), tol), tol);
}

Subspace image(const Matrix& map, const Subspace& v, const Tolerance& tol) {
  if (map.cols() != v.ambient_dim()) throw InputError("image: map and subspace sizes differ");
  return Subspace::span(map * v.basis(), tol);
}

int fredholm_pair_index(const Subspace& v, const Subspace& w, const Tolerance& tol) {
  require_same_ambient(v, w, "fredholm_pair_index");
  const int cap = intersect(v, w, tol).dim();
  const int codim_sum = v.ambient_dim() - sum(v, w, tol).dim();
  return cap - codim_sum;
}

int projection_restriction_index(const Subspace& v, const Subspace& w, const Tolerance& tol) {
  require_same_ambient(v, w, "projection_restriction_index");
  const Subspace target = orthocomplement(v, tol);
  // Coordinates of P_{V^perp} w in an orthonormal basis of V^perp.
  const Matrix restricted = target.basis().transpose() * w.basis();
  const int rank = numerical_rank(restricted, tol);
  const int kernel = w.dim() - rank;
  const int cokernel = target.dim() - rank;
  return kernel - cokernel;
}

int relative_dimension(const Subspace& v, const Subspace& w, const Tolerance& tol) {
  require_same_ambient(v, w, "relative_dimension");
  const int left = intersect(v, orthocomplement(w, tol), tol).dim();
  const int right = intersect(w, orthocomplement(v, tol), tol).dim();
  return left - right;
}

double kato_gamma(const Subspace& v, const Subspace& w, const Tolerance& tol) {
  require_same_ambient(v, w, "kato_gamma");
  const Subspace common = intersect(v, w, tol);
  Matrix remainder = w.basis();
  if (common.dim() > 0) {
    remainder = w.basis() * kernel_basis(common.basis().transpose() * w.basis(), tol);
  }
  if (remainder.cols() == 0) return 1.0;
  const Matrix complement_part = remainder - projection(v) * remainder;
  const Vector s = singular_values(complement_part);
  return std::clamp(s(s.size() - 1), 0.0, 1.0);
}

double gap_distance(const Subspace& v, const Subspace& w) {
  require_same_ambient(v, w, "gap_distance");
  if (v.ambient_dim() == 0) return 0.0;
  const Vector ev = eigvals_sym(projection(v) - projection(w));
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

Matrix graph_projection(const Matrix& l) {
  require_finite(l, "graph_projection");
  const Eigen::Index m0 = l.cols();
  const Eigen::Index m1 = l.rows();
  const Matrix k = (Matrix::Identity(m1, m1) + l * l.transpose()).llt().solve(Matrix::Identity(m1, m1));
  Matrix p(m0 + m1, m0 + m1);
  p.topLeftCorner(m0, m0) = Matrix::Identity(m0, m0) - l.transpose() * k * l;
  p.topRightCorner(m0, m1) = l.transpose() * k;
  p.bottomLeftCorner(m1, m0) = k * l;
  p.bottomRightCorner(m1, m1) = Matrix::Identity(m1, m1) - k;
  return p;
}

SubspacePath SubspacePath::sample(std::function<Subspace(double)> generator, double a, double b,
                                  int intervals) {
  if (intervals < 1 || !(b > a)) throw InputError("SubspacePath::sample: bad grid");
  SubspacePath path;
  for (int i = 0; i <= intervals; ++i) {
    const double t = a + (b - a) * static_cast<double>(i) / static_cast<double>(intervals);
    path.times.push_back(t);
    path.subspaces.push_back(generator(t));
  }
  path.generator = std::move(generator);
  return path;
}

void SubspacePath::validate() const {
  if (times.empty() || times.size() != subspaces.size()) {
    throw InputError("subspace path: times and subspaces must be non-empty and equal in length");
  }
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw InputError("subspace path: times must increase strictly");
    if (subspaces[i].ambient_dim() != subspaces[0].ambient_dim()) {
      throw InputError("subspace path: ambient dimensions differ");
    }
  }
}

const Matrix& LiftedPath::at(double t) const {
  const auto it = std::find(times.begin(), times.end(), t);
  if (it == times.end()) throw InputError("LiftedPath::at: time is not a sample");
  return phi[static_cast<std::size_t>(it - times.begin())];
}

Matrix kato_rotation(const Matrix& p, const Matrix& q, const Tolerance& tol) {
  const Eigen::Index n = p.rows();
  const Matrix id = Matrix::Identity(n, n);
  const Matrix d = p - q;
  const SymmetricEigen e = eig_sym(symmetrize(id - d * d), tol);
  if (e.values.size() > 0 && !(e.values(0) > 0.0)) {
    throw NumericalFailure("kato_rotation: projections are at gap distance 1");
  }
  const Vector inv_sqrt = e.values.cwiseSqrt().cwiseInverse();
  const Matrix root = e.vectors * inv_sqrt.asDiagonal() * e.vectors.transpose();
  return (q * p + (id - q) * (id - p)) * root;
}

LiftedPath lift_path(const SubspacePath& path, const Matrix& initial, const LiftOptions& options,
                     const Tolerance& tol) {
  path.validate();
  const int n = path.subspaces.front().ambient_dim();
  if (initial.rows() != n) throw InputError("lift_path: initial map has the wrong size");
  require_orthogonal(initial, 1e-9, "lift_path initial map");

  LiftedPath out;
  out.reference = image(initial.transpose(), path.subspaces.front(), tol);
  out.times.push_back(path.times.front());
  out.phi.push_back(initial);

  // Advance from the current image to `target`, bisecting while the gap is
  // above the refinement bound and a generator is available.
  std::function<void(double, const Subspace&, double, const Subspace&, int)> advance =
      [&](double ta, const Subspace& va, double tb, const Subspace& vb, int depth) {
        const double gap = gap_distance(va, vb);
        if (gap > options.max_gap && path.generator && depth < options.max_bisections) {
          const double tm = 0.5 * (ta + tb);
          const Subspace vm = path.generator(tm);
          advance(ta, va, tm, vm, depth + 1);
          ++out.refinements;
          advance(tm, vm, tb, vb, depth + 1);
          return;
        }
        if (gap >= 1.0 - 1e-9) {
          std::ostringstream msg;
          msg << "lift_path: projection gap " << gap << " on [" << ta << ", " << tb
              << "] could not be refined below 1";
          throw NumericalFailure(msg.str());
        }
        // Rotate from the subspace actually reached so errors do not accumulate.
        const Matrix& current = out.phi.back();
        const Matrix p_now = projection(image(current, out.reference, tol));
        const Matrix u = kato_rotation(p_now, projection(vb), tol);
        out.times.push_back(tb);
        out.phi.push_back(u * current);
      };

  for (std::size_t i = 1; i < path.times.size(); ++i) {
    advance(path.times[i - 1], path.subspaces[i - 1], path.times[i], path.subspaces[i], 0);
  }
  return out;
}

SymmetryOperator::SymmetryOperator(Matrix m) : m_(std::move(m)) {
  require_square(m_, "symmetry");
  require_finite(m_, "symmetry");
  const Eigen::Index n = m_.rows();
  if (n > 0 && (m_ - m_.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
    throw InputError("symmetry: matrix is not self-adjoint");
  }
  if (n > 0 && (m_ * m_ - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-9) {
    throw InputError("symmetry: matrix does not square to the identity");
  }
}

SymmetryOperator SymmetryOperator::from_positive_space(const Subspace& w) {
  const int n = w.ambient_dim();
  return SymmetryOperator(2.0 * projection(w) - Matrix::Identity(n, n));
}

Subspace SymmetryOperator::positive_space(const Tolerance& tol) const {
  return Subspace::from_orthonormal(kernel_basis(m_ - Matrix::Identity(dim(), dim()), tol));
}

SymmetryConjugation conjugate_symmetries_to_constant(std::span<const SymmetryOperator> symmetries,
                                                     const LiftOptions& options,
                                                     const Tolerance& tol) {
  if (symmetries.empty()) throw InputError("conjugate_symmetries_to_constant: empty grid");
  SubspacePath path;
  for (std::size_t i = 0; i < symmetries.size(); ++i) {
    path.times.push_back(static_cast<double>(i));
    path.subspaces.push_back(symmetries[i].positive_space(tol));
  }
  const int n = symmetries.front().dim();
  const LiftedPath lifted = lift_path(path, Matrix::Identity(n, n), options, tol);
  SymmetryConjugation out{{}, symmetries.front()};
  out.u.reserve(lifted.phi.size());
  for (const Matrix& phi : lifted.phi) out.u.push_back(phi.transpose());
  return out;
}

}  // namespace sfkit
