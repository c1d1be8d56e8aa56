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

#include "sfkit/instances.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace sfkit::cli {
namespace {

// Vector v with B(v, v) = 0 built from one positive and one negative
// eigendirection of a, or an empty matrix if a is semidefinite.
Matrix isotropic_vector(const Matrix& a, Rng& rng) {
  const SymmetricEigen e = eig_sym(a);
  const Eigen::Index n = a.rows();
  std::vector<Eigen::Index> neg, pos;
  const double band = Tolerance{}.band(e.values.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (e.values(i) < -band) neg.push_back(i);
    if (e.values(i) > band) pos.push_back(i);
  }
  if (neg.empty() || pos.empty()) return Matrix(n, 0);
  const Eigen::Index i = neg[static_cast<std::size_t>(rng.integer(0, static_cast<int>(neg.size()) - 1))];
  const Eigen::Index j = pos[static_cast<std::size_t>(rng.integer(0, static_cast<int>(pos.size()) - 1))];
  const double li = -e.values(i);
  const double lj = e.values(j);
  // li x^2 = lj y^2 with x^2 + y^2 = 1.
  const double x = std::sqrt(lj / (li + lj));
  const double y = std::sqrt(li / (li + lj));
  return x * e.vectors.col(i) + y * e.vectors.col(j);
}

Matrix kernel_vector(const Matrix& a, Rng& rng) {
  const Matrix k = kernel_basis(a);
  if (k.cols() == 0) return Matrix(a.rows(), 0);
  return k * rng.gaussian(static_cast<int>(k.cols()), 1);
}

// Span of the given columns topped up with Gaussian vectors to dimension k.
Subspace fill_to(Rng& rng, const Matrix& seeds, int n, int k) {
  Matrix cols(n, 0);
  for (Eigen::Index c = 0; c < seeds.cols() && cols.cols() < k; ++c) {
    cols.conservativeResize(n, cols.cols() + 1);
    cols.col(cols.cols() - 1) = seeds.col(c);
  }
  const int missing = k - static_cast<int>(cols.cols());
  if (missing > 0) {
    cols.conservativeResize(n, k);
    cols.rightCols(missing) = rng.gaussian(n, missing);
  }
  Subspace v = Subspace::span(cols);
  // Guard against an accidental rank drop among the engineered seeds.
  while (v.dim() < k) v = Subspace::span((Matrix(n, v.dim() + 1) << v.basis(), rng.gaussian(n, 1)).finished());
  return v;
}

}  // namespace

Matrix random_form_matrix(Rng& rng, int n, int zeros) {
  Vector ev(n);
  for (int i = 0; i < n; ++i) {
    ev(i) = i < zeros ? 0.0 : (rng.coin() ? 1.0 : -1.0) * rng.uniform(0.25, 2.0);
  }
  return rng.symmetric_with_spectrum(ev);
}

Subspace random_subspace(Rng& rng, int n, int k) {
  return fill_to(rng, Matrix(n, 0), n, k);
}

std::pair<Subspace, Subspace> random_subspace_pair(Rng& rng, int n) {
  const int kv = rng.integer(0, n);
  const int kw = rng.integer(0, n);
  const int common = rng.coin() ? rng.integer(0, std::min(kv, kw)) : 0;
  const Matrix shared = rng.gaussian(n, common);
  return {fill_to(rng, shared, n, kv), fill_to(rng, shared, n, kw)};
}

ReduceInstance random_reduce_instance(Rng& rng, int n, int codim, bool degenerate) {
  ReduceInstance out;
  out.degenerate = degenerate;
  const int zeros0 = degenerate ? rng.integer(1, std::min(2, n)) : 0;
  const int zeros1 = degenerate ? rng.integer(0, std::min(2, n)) : 0;
  out.a0 = random_form_matrix(rng, n, zeros0);
  out.a1 = random_form_matrix(rng, n, zeros1);
  const int k = n - codim;
  Matrix seeds(n, 0);
  auto append = [&](const Matrix& v) {
    if (v.cols() == 0) return;
    seeds.conservativeResize(n, seeds.cols() + 1);
    seeds.col(seeds.cols() - 1) = v.col(0);
  };
  if (degenerate) {
    if (rng.coin()) append(kernel_vector(out.a0, rng));
    if (rng.coin()) append(kernel_vector(out.a1, rng));
    if (rng.coin(0.3)) append(isotropic_vector(out.a0, rng));
    if (rng.coin(0.3)) append(isotropic_vector(out.a1, rng));
  }
  out.v = fill_to(rng, seeds, n, k);
  return out;
}

SubspacePath VaryInstance::family() const {
  const Matrix k = rotation;
  const Matrix base = v0;
  return SubspacePath::sample(
      [k, base](double t) {
        const Matrix rot = (t * k).exp();
        return Subspace::span(rot * base);
      },
      0.0, 1.0, intervals);
}

VaryInstance random_vary_instance(Rng& rng, int n, int codim) {
  VaryInstance out;
  out.a0 = random_form_matrix(rng, n);
  out.a1 = random_form_matrix(rng, n);
  out.v0 = random_subspace(rng, n, n - codim).basis();
  out.rotation = rng.antisymmetric(n, rng.uniform(0.5, 3.0));
  return out;
}

OperatorPath random_path(Rng& rng, int n) {
  const int knots = rng.integer(2, 5);
  std::vector<double> times;
  std::vector<Matrix> forms;
  for (int i = 0; i < knots; ++i) {
    times.push_back(static_cast<double>(i) / (knots - 1));
    forms.push_back(random_form_matrix(rng, n));
  }
  return OperatorPath::from_samples(std::move(times), std::move(forms));
}

FormPair random_form_pair(Rng& rng, int n) {
  const int zeros = rng.coin() ? rng.integer(1, std::min(2, n)) : 0;
  const Matrix a = random_form_matrix(rng, n, zeros);
  const int k = rng.integer(0, n);
  Matrix seeds(n, 0);
  auto append = [&](const Matrix& v) {
    if (v.cols() == 0) return;
    seeds.conservativeResize(n, seeds.cols() + 1);
    seeds.col(seeds.cols() - 1) = v.col(0);
  };
  if (rng.coin(0.3)) append(kernel_vector(a, rng));
  if (rng.coin(0.3)) append(isotropic_vector(a, rng));
  return {SymmetricForm(a), fill_to(rng, seeds, n, k)};
}

}  // namespace sfkit::cli
