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

// Reference computations that avoid the toolkit's own eigen/rank code paths.

#include <Eigen/Dense>

#include "sfkit/linalg.hpp"

namespace oracle {

using sfkit::Matrix;
using sfkit::Vector;

inline Vector eigenvalues(const Matrix& a) {
  if (a.rows() == 0) return Vector(0);
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

inline Vector pencil_eigenvalues(const Matrix& a, const Matrix& m) {
  if (a.rows() == 0) return Vector(0);
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(a, m, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

inline double band(const Vector& ev) {
  const double rho = ev.size() == 0 ? 0.0 : ev.cwiseAbs().maxCoeff();
  return 1e-12 + 1e-9 * rho;
}

inline int negatives(const Vector& ev) {
  const double b = band(ev);
  return static_cast<int>((ev.array() < -b).count());
}

inline int zeros(const Vector& ev) {
  const double b = band(ev);
  return static_cast<int>((ev.array().abs() <= b).count());
}

inline int n_minus(const Matrix& a) { return negatives(eigenvalues(a)); }

/// Rank through column-pivoted QR.
inline int rank(const Matrix& a) {
  if (a.size() == 0) return 0;
  Eigen::ColPivHouseholderQR<Matrix> qr(a);
  qr.setThreshold(1e-9);
  return static_cast<int>(qr.rank());
}

/// dim(V cap W) = dim V + dim W - rank [V W].
inline int intersection_dim(const Matrix& v, const Matrix& w) {
  Matrix both(v.rows(), v.cols() + w.cols());
  both << v, w;
  return static_cast<int>(v.cols() + w.cols()) - rank(both);
}

inline Matrix rotation2(double theta) {
  Matrix r(2, 2);
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return r;
}

inline Matrix e(int n, std::initializer_list<int> idx) {
  Matrix out = Matrix::Zero(n, static_cast<Eigen::Index>(idx.size()));
  int c = 0;
  for (int i : idx) out(i, c++) = 1.0;
  return out;
}

}  // namespace oracle
