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

#include "sfkit/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sfkit/errors.hpp"

namespace sfkit {
namespace {

constexpr int kMaxSweeps = 100;
constexpr double kOffDiagonalEps = 1e-15;

// Cyclic-by-row Jacobi on a symmetric matrix held in full storage.
// On return `a` is diagonal to working precision. When `vectors` is non-null
// it accumulates the rotations so that a_in = V diag V^T.
void jacobi_diagonalize(Matrix& a, Matrix* vectors) {
  const Eigen::Index n = a.rows();
  if (vectors != nullptr) vectors->setIdentity(n, n);
  if (n < 2) return;

  const double frob = a.norm();
  if (frob == 0.0) return;
  const double negligible = kOffDiagonalEps * frob / static_cast<double>(n);

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index q = 1; q < n; ++q) off += a.col(q).head(q).squaredNorm();
    if (off <= (kOffDiagonalEps * frob) * (kOffDiagonalEps * frob)) return;

    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= negligible) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        const double app = a(p, p);
        const double aqq = a(q, q);
        const double theta = (aqq - app) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        // Columns p, q of A J; rows follow by symmetry.
        Vector colp = a.col(p);
        a.col(p) = c * colp - s * a.col(q);
        a.col(q) = s * colp + c * a.col(q);
        a.row(p) = a.col(p).transpose();
        a.row(q) = a.col(q).transpose();
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;

        if (vectors != nullptr) {
          Vector vp = vectors->col(p);
          vectors->col(p) = c * vp - s * vectors->col(q);
          vectors->col(q) = s * vp + c * vectors->col(q);
        }
      }
    }
  }
  throw NumericalFailure("eig_sym: Jacobi sweeps did not converge");
}

std::vector<Eigen::Index> ascending_order(const Vector& d) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(d.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return d(i) < d(j); });
  return order;
}

Matrix pencil_reduce(const Matrix& a, const Eigen::LLT<Matrix>& llt) {
  // C = L^{-1} A L^{-T}
  const Matrix y = llt.matrixL().solve(a);
  const Matrix yt = y.transpose();
  return symmetrize(llt.matrixL().solve(yt));
}

Eigen::LLT<Matrix> factor_gram(const Matrix& a, const Matrix& m, const Tolerance& tol) {
  require_symmetric(a, "pencil matrix", tol);
  require_symmetric(m, "gram matrix", tol);
  if (a.rows() != m.rows()) throw InputError("pencil: matrix and gram differ in size");
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) throw InputError("gram matrix is not positive definite");
  const Vector diag = Matrix(llt.matrixL()).diagonal();
  if (diag.size() > 0 && !(diag.minCoeff() > 0.0)) {
    throw InputError("gram matrix is not positive definite");
  }
  return llt;
}

}  // namespace

bool Tolerance::is_zero(double value, double scale) const {
  return std::abs(value) <= band(scale);
}

void Tolerance::validate() const {
  if (!(rel_zero > 0.0) || !std::isfinite(rel_zero) || !(abs_zero > 0.0) ||
      !std::isfinite(abs_zero)) {
    throw InputError("tolerance thresholds must be positive and finite");
  }
}

void require_finite(const Matrix& m, std::string_view what) {
  if (!m.allFinite()) throw InputError(std::string(what) + ": non-finite entry");
}

void require_square(const Matrix& m, std::string_view what) {
  if (m.rows() != m.cols()) {
    throw InputError(std::string(what) + ": expected a square matrix, got " +
                     std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

void require_symmetric(const Matrix& m, std::string_view what, const Tolerance& tol) {
  require_square(m, what);
  require_finite(m, what);
  if (m.size() == 0) return;
  const double scale = m.cwiseAbs().maxCoeff();
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol.band(scale)) {
    throw InputError(std::string(what) + ": matrix is not symmetric");
  }
}

SymmetricEigen eig_sym(const Matrix& a, const Tolerance& tol) {
  require_symmetric(a, "eig_sym", tol);
  Matrix work = symmetrize(a);
  Matrix v;
  jacobi_diagonalize(work, &v);
  const Vector d = work.diagonal();
  const auto order = ascending_order(d);
  SymmetricEigen out;
  out.values.resize(d.size());
  out.vectors.resize(a.rows(), a.cols());
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    out.values(i) = d(order[k]);
    out.vectors.col(i) = v.col(order[k]);
  }
  return out;
}

Vector eigvals_sym(const Matrix& a, const Tolerance& tol) {
  require_symmetric(a, "eig_sym", tol);
  Matrix work = symmetrize(a);
  jacobi_diagonalize(work, nullptr);
  Vector d = work.diagonal();
  std::sort(d.begin(), d.end());
  return d;
}

SymmetricEigen eig_pencil(const Matrix& a, const Matrix& m, const Tolerance& tol) {
  const auto llt = factor_gram(a, m, tol);
  SymmetricEigen reduced = eig_sym(pencil_reduce(a, llt), tol);
  reduced.vectors = llt.matrixU().solve(reduced.vectors);
  return reduced;
}

Vector eigvals_pencil(const Matrix& a, const Matrix& m, const Tolerance& tol) {
  const auto llt = factor_gram(a, m, tol);
  return eigvals_sym(pencil_reduce(a, llt), tol);
}

Inertia inertia(const Vector& eigenvalues, const Tolerance& tol) {
  Inertia out;
  const double radius = eigenvalues.size() > 0 ? eigenvalues.cwiseAbs().maxCoeff() : 0.0;
  out.band = tol.band(radius);
  for (double lambda : eigenvalues) {
    if (lambda < -out.band) {
      ++out.negative;
    } else if (lambda > out.band) {
      ++out.positive;
    } else {
      ++out.zero;
      continue;
    }
    out.gap = std::min(out.gap, std::abs(lambda) - out.band);
  }
  return out;
}

Vector singular_values(const Matrix& a) {
  if (a.size() == 0) return Vector(0);
  require_finite(a, "singular_values");
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues();
}

int numerical_rank(const Matrix& a, const Tolerance& tol) {
  const Vector s = singular_values(a);
  if (s.size() == 0) return 0;
  const double cut = tol.band(s(0));
  int rank = 0;
  for (double v : s) rank += v > cut ? 1 : 0;
  return rank;
}

Matrix orthonormal_basis(const Matrix& columns, const Tolerance& tol) {
  if (columns.cols() == 0 || columns.rows() == 0) return Matrix(columns.rows(), 0);
  require_finite(columns, "orthonormal_basis");
  Eigen::JacobiSVD<Matrix> svd(columns, Eigen::ComputeThinU);
  const Vector& s = svd.singularValues();
  const double cut = tol.band(s(0));
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > cut) ++rank;
  return svd.matrixU().leftCols(rank);
}

Matrix kernel_basis(const Matrix& a, const Tolerance& tol) {
  const Eigen::Index cols = a.cols();
  if (cols == 0) return Matrix(0, 0);
  if (a.rows() == 0) return Matrix::Identity(cols, cols);
  require_finite(a, "kernel_basis");
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  const double cut = tol.band(s(0));
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > cut) ++rank;
  return svd.matrixV().rightCols(cols - rank);
}

double norm2(const Matrix& a) {
  const Vector s = singular_values(a);
  return s.size() > 0 ? s(0) : 0.0;
}

Matrix symmetrize(const Matrix& a) { return 0.5 * (a + a.transpose()); }

}  // namespace sfkit
