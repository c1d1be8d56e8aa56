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

#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "sfkit/errors.hpp"
#include "sfkit/forms.hpp"
#include "sfkit/instances.hpp"

using namespace sfkit;
using oracle::e;

namespace {

SymmetricForm diag(std::initializer_list<double> d) {
  Vector v(static_cast<Eigen::Index>(d.size()));
  int i = 0;
  for (double x : d) v(i++) = x;
  return SymmetricForm(v.asDiagonal());
}

Subspace span_of(const Matrix& cols) { return Subspace::span(cols); }

Matrix vec(std::initializer_list<double> d) {
  Matrix v(static_cast<Eigen::Index>(d.size()), 1);
  int i = 0;
  for (double x : d) v(i++, 0) = x;
  return v;
}

bool same(const Subspace& a, const Subspace& b) { return a.dim() == b.dim() && gap_distance(a, b) < 1e-9; }

}  // namespace

TEST_CASE("spectral split examples") {
  const SpectralSplit s = spectral_split(diag({1, -1, 0}));
  CHECK(same(s.plus, span_of(e(3, {0}))));
  CHECK(same(s.minus, span_of(e(3, {1}))));
  CHECK(same(s.kernel, span_of(e(3, {2}))));

  const SpectralSplit p = spectral_split(diag({2, 3}));
  CHECK(p.minus.dim() == 0);
  CHECK(p.kernel.dim() == 0);

  cli::Rng rng(3);
  Vector ev(5);
  ev << -2.0, -1.0, 1e-15, 0.7, 1.5;
  const SpectralSplit r = spectral_split(SymmetricForm(rng.symmetric_with_spectrum(ev)));
  CHECK(r.kernel.dim() == 1);
  CHECK(r.minus.dim() == 2);
  CHECK(r.plus.dim() == 2);
}

TEST_CASE("spectral split orthogonality on random forms") {
  cli::Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = rng.integer(1, 9);
    const Matrix a = cli::random_form_matrix(rng, n, rng.integer(0, std::min(2, n)));
    const SpectralSplit s = spectral_split(SymmetricForm(a));
    const double scale = 1e-8 * std::max(1.0, norm2(a));
    CHECK(s.minus.dim() + s.plus.dim() + s.kernel.dim() == n);
    CHECK((s.minus.basis().transpose() * s.plus.basis()).norm() <= scale);
    CHECK((s.minus.basis().transpose() * s.kernel.basis()).norm() <= scale);
    CHECK((s.minus.basis().transpose() * a * s.plus.basis()).norm() <= scale);
    CHECK(s.minus.dim() == oracle::n_minus(a));
  }
}

TEST_CASE("Morse index, coindex and nullity") {
  CHECK(morse_index(diag({-2, -1, 3})) == 2);
  CHECK(coindex(diag({-2, -1, 3})) == 1);
  CHECK(morse_index(SymmetricForm(Matrix::Zero(4, 4))) == 0);
  CHECK(nullity(SymmetricForm(Matrix::Zero(4, 4))) == 4);

  Matrix m = Matrix::Zero(2, 2);
  m.diagonal() << 4.0, 1.0;
  const SymmetricForm pencil(diag({-1, 1}).matrix(), m);
  CHECK(morse_index(pencil) == 1);
  const Vector ev = pencil.eigenvalues();
  CHECK(ev(0) == doctest::Approx(-0.25));
  CHECK(ev(1) == doctest::Approx(1.0));
}

TEST_CASE("SymmetricForm validation") {
  Matrix a(2, 2);
  a << 1, 2, 0, 1;
  CHECK_THROWS_AS(SymmetricForm{a}, InputError);
  CHECK_THROWS_AS(SymmetricForm(Matrix::Identity(2, 2), Matrix::Identity(3, 3)), InputError);
  CHECK_THROWS_AS(SymmetricForm(Matrix::Identity(2, 2), -Matrix::Identity(2, 2)), InputError);
}

TEST_CASE("restrict examples") {
  const SymmetricForm b = diag({1, -1});
  CHECK(restrict(b, span_of(e(2, {0}))).matrix()(0, 0) == doctest::Approx(1.0));
  const SymmetricForm full = restrict(b, Subspace::whole(2));
  CHECK(index_counts(full).negative == 1);
  CHECK(index_counts(full).positive == 1);
  CHECK(std::abs(restrict(b, span_of(vec({1, 1}))).matrix()(0, 0)) < 1e-15);
  CHECK_THROWS_AS(restrict(b, Subspace::whole(3)), InputError);
}

TEST_CASE("B-orthogonal complement examples") {
  CHECK(same(b_orthocomplement(diag({1, 1, 0}), span_of(e(3, {0}))), span_of(e(3, {1, 2}))));
  CHECK(b_orthocomplement(diag({1, -2, 3}), Subspace::whole(3)).dim() == 0);
  const Subspace v = span_of(vec({1, 1}));
  CHECK(same(b_orthocomplement(diag({1, -1}), v), v));
}

TEST_CASE("B-orthogonal complement dimension formula") {
  cli::Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = rng.integer(1, 9);
    const cli::FormPair fp = cli::random_form_pair(rng, n);
    const Subspace comp = b_orthocomplement(fp.b, fp.v);
    CHECK(comp.dim() == fp.v.codim() + intersect(form_kernel(fp.b), fp.v).dim());
  }
}

TEST_CASE("isotropic subspaces") {
  CHECK(is_isotropic(diag({1, 0, 0}), span_of(e(3, {1, 2}))));
  CHECK(is_isotropic(diag({1, -1}), span_of(vec({1, 1}))));
  CHECK_FALSE(is_isotropic(diag({1, 1}), span_of(e(2, {0}))));

  const IsotropicBounds b1 = isotropic_bounds(diag({1, -1}), span_of(vec({1, 1})));
  CHECK(b1.dim_z == 1);
  CHECK(b1.n_minus == 1);
  CHECK(b1.n_plus == 1);
  CHECK(b1.dim_z_cap_kernel == 0);
  CHECK(b1.holds());

  Matrix z(4, 2);
  z << 1, 0, 1, 0, 0, 1, 0, 1;
  const IsotropicBounds b2 = isotropic_bounds(diag({1, -1, 1, -1}), span_of(z));
  CHECK(b2.dim_z == 2);
  CHECK(b2.n_minus == 2);
  CHECK(b2.holds());

  const IsotropicBounds b3 = isotropic_bounds(diag({0, 0, 1}), span_of(e(3, {0, 1})));
  CHECK(b3.dim_z == 2);
  CHECK(b3.dim_z_cap_kernel == 2);
  CHECK(b3.holds());

  CHECK_THROWS_AS(isotropic_bounds(diag({1, 1}), span_of(e(2, {0}))), InputError);
}

TEST_CASE("negative space relative dimension examples") {
  const NegativeSpaceComparison a = negative_space_relative_dimension(diag({1, -1}), span_of(vec({1, 1})));
  CHECK(a.direct == 1);
  CHECK(a.formula == 1);
  CHECK(a.terms.n_minus_complement == 0);
  CHECK(a.terms.dim_v_cap_complement == 1);
  CHECK(a.terms.dim_v_cap_kernel == 0);

  const NegativeSpaceComparison b = negative_space_relative_dimension(diag({-1, -1, 1}), span_of(e(3, {0, 1})));
  CHECK(b.direct == 0);
  CHECK(b.formula == 0);

  const NegativeSpaceComparison c = negative_space_relative_dimension(diag({-1, 2, 0}), Subspace::whole(3));
  CHECK(c.direct == 0);
  CHECK(c.formula == 0);
}

TEST_CASE("restriction identities on random form/subspace pairs") {
  cli::Rng rng(29);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = rng.integer(1, 9);
    const cli::FormPair fp = cli::random_form_pair(rng, n);
    const SymmetricForm& b = fp.b;
    const Subspace& v = fp.v;
    const Subspace comp = b_orthocomplement(b, v);
    const Subspace cap = intersect(v, comp);
    const SymmetricForm bv = restrict(b, v);

    // ker(B|V) = V n V^{perp_B}.
    CHECK(nullity(bv) == cap.dim());
    if (cap.dim() == 0) {
      CHECK(nullity(bv) == 0);
      CHECK(v.dim() + comp.dim() == n);
      CHECK(sum(v, comp).dim() == n);
    }
    // (V n V^{perp_B})^{perp_B} = V + V^{perp_B}.
    CHECK(same(b_orthocomplement(b, cap), sum(v, comp)));

    const NegativeSpaceComparison cmp = negative_space_relative_dimension(b, v);
    CHECK(cmp.direct == cmp.formula);
    if (sum(v, comp).dim() == n) {
      CHECK(cmp.direct == morse_index(restrict(b, comp)));
    }
  }
}

TEST_CASE("isotropic subspaces force indefiniteness") {
  cli::Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = rng.integer(2, 8);
    Vector ev(n);
    for (int i = 0; i < n; ++i) ev(i) = (i % 2 == 0 ? 1.0 : -1.0) * rng.uniform(0.5, 2.0);
    const Matrix a = rng.symmetric_with_spectrum(ev);
    const SymmetricEigen eg = eig_sym(a);
    const double x = std::sqrt(eg.values(n - 1) / (eg.values(n - 1) - eg.values(0)));
    const double y = std::sqrt(-eg.values(0) / (eg.values(n - 1) - eg.values(0)));
    const Matrix z = x * eg.vectors.col(0) + y * eg.vectors.col(n - 1);
    const SymmetricForm b(a);
    const Subspace zs = span_of(z);
    REQUIRE(is_isotropic(b, zs));
    CHECK(morse_index(b) >= 1);
    CHECK(coindex(b) >= 1);

    // L = Z^{perp_B}; the relative dimension equals dim Z - dim(Z n ker).
    const NegativeSpaceComparison cmp = negative_space_relative_dimension(b, b_orthocomplement(b, zs));
    CHECK(cmp.direct == zs.dim() - intersect(zs, form_kernel(b)).dim());
  }
}

TEST_CASE("positive semidefinite forms are definite off the kernel") {
  cli::Rng rng(37);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = rng.integer(2, 8);
    Vector ev(n);
    for (int i = 0; i < n; ++i) ev(i) = i < 2 ? 0.0 : rng.uniform(0.3, 2.0);
    const SymmetricForm b(rng.symmetric_with_spectrum(ev));
    const SymmetricForm off = restrict(b, orthocomplement(form_kernel(b)));
    CHECK(index_counts(off).positive == n - 2);
    CHECK(index_counts(off).zero == 0);
  }
}

TEST_CASE("negative space pairs with the nonnegative space with index zero") {
  cli::Rng rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = rng.integer(1, 8);
    const SymmetricForm b(cli::random_form_matrix(rng, n, rng.integer(0, std::min(2, n))));
    const SpectralSplit s = spectral_split(b);
    CHECK(fredholm_pair_index(s.minus, sum(s.plus, s.kernel)) == 0);
  }
}
