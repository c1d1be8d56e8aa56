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
#include <numbers>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "sfkit/errors.hpp"
#include "sfkit/instances.hpp"
#include "sfkit/spectral_flow.hpp"

using namespace sfkit;
using oracle::e;

namespace {

Matrix diagm(std::initializer_list<double> d) {
  Vector v(static_cast<Eigen::Index>(d.size()));
  int i = 0;
  for (double x : d) v(i++) = x;
  return v.asDiagonal();
}

// diag(base) + t diag(slope) on [0, 1]
OperatorPath diag_path(std::initializer_list<double> base, std::initializer_list<double> slope) {
  return OperatorPath::linear(diagm(base), diagm(slope));
}

// Oracle: count negative eigenvalues at both ends.
int endpoint_oracle(const OperatorPath& p) {
  const auto count = [](const SymmetricForm& f) {
    return f.has_gram() ? oracle::negatives(oracle::pencil_eigenvalues(f.matrix(), f.gram()))
                        : oracle::n_minus(f.matrix());
  };
  return count(p.at(p.start())) - count(p.at(p.end()));
}

Matrix rotation(int n, double angle) {
  Matrix r = Matrix::Identity(n, n);
  r.topLeftCorner(2, 2) = oracle::rotation2(angle);
  return r;
}

}  // namespace

TEST_CASE("sf_endpoints examples") {
  CHECK(sf_endpoints(OperatorPath::linear(diagm({1, -2}), Matrix::Zero(2, 2))).sf == 0);
  CHECK(sf_endpoints(diag_path({-1, 1}, {2, 0})).sf == 1);
  CHECK(sf_endpoints(diag_path({1, -1}, {-2, 0})).sf == -1);

  const FlowReport r = sf_endpoints(diag_path({0, 1}, {1, 0}));
  CHECK(r.sf == 0);
  CHECK(r.nullity_start == 1);
  CHECK(r.nullity_end == 0);
  CHECK(r.degenerate_endpoint());
  CHECK_FALSE(r.warnings.empty());

  const FlowReport g = sf_endpoints(diag_path({-1, 1}, {2, 0}));
  CHECK(g.min_endpoint_gap == doctest::Approx(1.0));
  CHECK(g.warnings.empty());
}

TEST_CASE("sf_partition examples") {
  const FlowReport up = sf_partition(diag_path({-1, 1}, {2, 0}));
  CHECK(up.sf == 1);
  CHECK(up.method == FlowMethod::kPartition);
  REQUIRE_FALSE(up.partition.empty());
  for (const PartitionCell& c : up.partition) CHECK(c.margin > 0.0);
  CHECK(up.partition.front().t_begin == 0.0);
  CHECK(up.partition.back().t_end == 1.0);

  CHECK(sf_partition(OperatorPath::linear(diagm({1, -2}), Matrix::Zero(2, 2))).sf == 0);

  const OperatorPath touch(-1.0, 1.0, 1, [](double t) {
    Matrix m(1, 1);
    m(0, 0) = t * t;
    return SymmetricForm(m);
  });
  CHECK(sf_partition(touch).sf == 0);
  CHECK(sf_endpoints(touch).sf == 0);
}

TEST_CASE("sf_partition reports an exhausted refinement budget") {
  // one crossing, seen only at the two ends: the drift swamps every threshold
  const OperatorPath jump = diag_path({-1}, {2});
  PartitionOptions tight;
  tight.check_points = 2;
  tight.max_depth = 0;
  CHECK_THROWS_AS(sf_partition(jump, tight), NumericalFailure);
  try {
    sf_partition(jump, tight);
  } catch (const NumericalFailure& err) {
    CHECK(std::string(err.what()).find("[0") != std::string::npos);
  }
}

TEST_CASE("sf_restricted examples") {
  CHECK(sf_restricted(diag_path({-1, 1}, {2, 0}), Subspace::span(e(2, {1}))).sf == 0);
  CHECK(sf_restricted(diag_path({-1, 1, -1}, {2, 0, 0}), Subspace::span(e(3, {0, 1}))).sf == 1);
  const OperatorPath p = diag_path({-1, 1, -1}, {2, 0, 0});
  CHECK(sf_restricted(p, Subspace::whole(3)).sf == sf_endpoints(p).sf);
  CHECK_THROWS_AS(sf_restricted(p, Subspace::whole(2)), InputError);
}

TEST_CASE("verify_reduction examples") {
  const ReductionReport a = verify_reduction(diag_path({-1, 1, -1}, {2, 0, 0}), Subspace::span(e(3, {0, 1})));
  CHECK(a.lhs == 0);
  CHECK(a.rhs == 0);
  CHECK(a.terms_start.n_minus_complement == 1);
  CHECK(a.terms_start.dim_v_cap_complement == 0);
  CHECK(a.terms_start.dim_v_cap_kernel == 0);
  CHECK(a.terms_end.n_minus_complement == 1);
  CHECK(a.holds());

  const ReductionReport b = verify_reduction(diag_path({0, 1}, {1, 0}), Subspace::span(e(2, {1})));
  CHECK(b.lhs == 0);
  CHECK(b.rhs == 0);
  CHECK(b.terms_start.total() == 0);

  const ReductionReport c = verify_reduction(diag_path({-1, 1, -1}, {2, 0, 0}), Subspace::whole(3));
  CHECK(c.lhs == 0);
  CHECK(c.rhs == 0);
}

TEST_CASE("verify_reduction on random instances") {
  cli::Rng rng(101);
  int degenerate = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int n = rng.integer(2, 12);
    const int codim = rng.integer(0, std::min(4, n - 1));
    const bool deg = trial % 3 == 0;
    const cli::ReduceInstance inst = cli::random_reduce_instance(rng, n, codim, deg);
    const ReductionReport r = verify_reduction(inst.path(), inst.v);
    CHECK(r.lhs == r.rhs);
    CHECK(r.sf_full == endpoint_oracle(inst.path()));
    if (deg) degenerate += nullity(SymmetricForm(inst.a0)) > 0 ? 1 : 0;
  }
  CHECK(degenerate >= 50);
}

TEST_CASE("sf_varying examples") {
  const OperatorPath p = diag_path({-1, 1, -1}, {2, 0, 0});
  const Subspace v = Subspace::span(e(3, {0, 1}));
  const SubspacePath fixed = SubspacePath::sample([&](double) { return v; }, 0.0, 1.0, 4);
  CHECK(sf_varying(p, fixed).flow.sf == sf_restricted(p, v).sf);
  const VaryingReductionReport fr = verify_reduction_varying(p, fixed);
  CHECK(fr.lhs == verify_reduction(p, v).lhs);
  CHECK(fr.holds());

  const OperatorPath identity = OperatorPath::linear(Matrix::Identity(2, 2), Matrix::Zero(2, 2));
  const SubspacePath line = SubspacePath::sample(
      [](double t) {
        Matrix c(2, 1);
        c << std::cos(std::numbers::pi * t), std::sin(std::numbers::pi * t);
        return Subspace::span(c);
      },
      0.0, 1.0, 16);
  CHECK(sf_varying(identity, line).flow.sf == 0);
  const VaryingReductionReport lr = verify_reduction_varying(identity, line);
  CHECK(lr.lhs == lr.rhs);

  const OperatorPath flat = OperatorPath::linear(diagm({1, 1, -1}), Matrix::Zero(3, 3));
  const SubspacePath turning = SubspacePath::sample(
      [](double t) {
        Matrix c = Matrix::Zero(3, 2);
        c(0, 0) = std::cos(t);
        c(1, 0) = std::sin(t);
        c(2, 1) = 1.0;
        return Subspace::span(c);
      },
      0.0, 1.0, 16);
  const VaryingFlow vf = sf_varying(flat, turning);
  CHECK(vf.flow.sf == 0);
  CHECK(morse_index(vf.reduced_start) == 1);
  CHECK(morse_index(vf.reduced_end) == 1);
}

TEST_CASE("sf_varying does not depend on the initial isometry") {
  cli::Rng rng(211);
  for (int trial = 0; trial < 40; ++trial) {
    const cli::VaryInstance inst = cli::random_vary_instance(rng, 8, 2);
    const SubspacePath family = inst.family();
    const int base = sf_varying(inst.path(), family).flow.sf;
    const Matrix u = rng.orthogonal(8);
    CHECK(sf_varying(inst.path(), family, u).flow.sf == base);
    const VaryingReductionReport r = verify_reduction_varying(inst.path(), family, u);
    CHECK(r.lhs == r.rhs);
    CHECK(r.rhs_by_terms == r.rhs);
  }
}

TEST_CASE("cogredient transforms keep sf") {
  const OperatorPath p = diag_path({-1, 1, -1}, {2, -2, 0});
  const int sf = sf_endpoints(p).sf;
  const OperatorPath same = cogredient_transform(p, [](double) { return Matrix::Identity(3, 3); });
  CHECK((same.at(0.3).matrix() - p.at(0.3).matrix()).norm() < 1e-14);
  CHECK(sf_endpoints(cogredient_transform(p, [](double) { return Matrix(2.0 * Matrix::Identity(3, 3)); })).sf == sf);
  CHECK(sf_endpoints(cogredient_transform(p, [](double t) { return rotation(3, t); })).sf == sf);

  std::vector<double> times{0.0, 0.5, 1.0};
  std::vector<Matrix> bad{Matrix::Identity(3, 3), Matrix::Zero(3, 3), Matrix::Identity(3, 3)};
  CHECK_THROWS_AS(cogredient_transform(p, times, bad), InputError);

  cli::Rng rng(307);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = rng.integer(1, 8);
    const OperatorPath q = cli::random_path(rng, n);
    const Matrix s0 = rng.orthogonal(n) * (1.0 + rng.uniform());
    const Matrix s1 = rng.orthogonal(n) * (1.0 + rng.uniform());
    // keep S invertible along the way: same orientation class
    const Matrix fix = (s0.determinant() * s1.determinant() < 0) ? Matrix(-Matrix::Identity(n, n)) : Matrix::Identity(n, n);
    const OperatorPath t = cogredient_transform(q, [&](double x) {
      if (n % 2 == 1 || fix(0, 0) > 0) return Matrix(s0);
      return Matrix((1 - x) * s0 + x * s0 * rotation(n, 0.1 * x));
    });
    CHECK(sf_endpoints(t).sf == sf_endpoints(q).sf);
  }
}

TEST_CASE("method agreement, concatenation and endpoint dependence") {
  cli::Rng rng(401);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = rng.integer(1, 10);
    const OperatorPath p = cli::random_path(rng, n);
    const int sf = sf_endpoints(p).sf;
    CHECK(sf == endpoint_oracle(p));
    CHECK(sf_partition(p).sf == sf);

    const double mid = rng.uniform(0.1, 0.9);
    CHECK(sf_endpoints(p.slice(0.0, mid)).sf + sf_endpoints(p.slice(mid, 1.0)).sf == sf);
    CHECK(sf_partition(p.slice(0.0, mid)).sf + sf_partition(p.slice(mid, 1.0)).sf == sf);

    // a different route between the same endpoints
    const Matrix detour = cli::random_form_matrix(rng, n);
    const OperatorPath other = OperatorPath::from_samples(
        {0.0, 0.5, 1.0}, {p.at(0.0).matrix(), detour, p.at(1.0).matrix()});
    CHECK(sf_partition(other).sf == sf);
  }
}

TEST_CASE("gram-weighted paths") {
  Matrix m(2, 2);
  m << 2.0, 0.5, 0.5, 1.0;
  const OperatorPath p = OperatorPath::linear(diagm({-1, 1}), diagm({2, 0}), 0.0, 1.0, m);
  CHECK(sf_endpoints(p).sf == 1);
  CHECK(sf_partition(p).sf == 1);
}

TEST_CASE("from_samples validation") {
  CHECK_THROWS_AS(OperatorPath::from_samples({0.0, 1.0}, {Matrix::Identity(2, 2), Matrix::Identity(3, 3)}), InputError);
  CHECK_THROWS_AS(OperatorPath::from_samples({1.0, 0.0}, {Matrix::Identity(2, 2), Matrix::Identity(2, 2)}), InputError);
  CHECK_THROWS_AS(OperatorPath::from_samples({0.0}, {Matrix::Identity(2, 2)}), InputError);
}

TEST_CASE("eigenvalue trace CSV") {
  std::ostringstream out;
  write_eigenvalue_trace(out, diag_path({-1, 1}, {2, 0}), 3);
  std::istringstream in(out.str());
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(in, line)) rows.push_back(line);
  REQUIRE(rows.size() >= 3);
  const std::string& last = rows.back();
  CHECK(last.rfind("1", 0) == 0);
  CHECK(std::count(last.begin(), last.end(), ',') == 2);
}
