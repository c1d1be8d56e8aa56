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

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "sfkit/commands.hpp"
#include "sfkit/errors.hpp"
#include "sfkit/instances.hpp"
#include "sfkit/json_io.hpp"
#include "sfkit/scenario.hpp"

using namespace sfkit;
using namespace sfkit::cli;

namespace {

struct TempFile {
  std::filesystem::path path;
  explicit TempFile(const std::string& body, const std::string& name) {
    path = std::filesystem::temp_directory_path() / ("sfkit_test_" + name + ".json");
    std::ofstream(path) << body;
  }
  ~TempFile() { std::filesystem::remove(path); }
};

}  // namespace

TEST_CASE("rng is deterministic per seed") {
  Rng a(42), b(42), c(43);
  for (int i = 0; i < 20; ++i) {
    const double x = a.uniform();
    CHECK(x == b.uniform());
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
  CHECK(a.uniform() != c.uniform());

  Rng r(7);
  const Matrix q = r.orthogonal(6);
  CHECK((q.transpose() * q - Matrix::Identity(6, 6)).norm() < 1e-12);
  const Matrix k = r.antisymmetric(5, 0.3);
  CHECK((k + k.transpose()).norm() < 1e-14);
  CHECK(norm2(k) == doctest::Approx(0.3));
  for (int i = 0; i < 100; ++i) {
    const int v = r.integer(2, 4);
    CHECK(v >= 2);
    CHECK(v <= 4);
  }
}

TEST_CASE("random instances respect their shape") {
  Rng rng(5);
  const Matrix a = random_form_matrix(rng, 6, 2);
  const Vector ev = eigvals_sym(a);
  CHECK((ev.array().abs() < 1e-12).count() == 2);
  CHECK((ev.array().abs() > 0.2).count() == 4);

  const ReduceInstance inst = random_reduce_instance(rng, 7, 3, true);
  CHECK(inst.v.dim() == 4);
  CHECK(inst.a0.rows() == 7);
}

TEST_CASE("path scenarios") {
  const Json lin = Json::parse(R"({"linear": {"A0": [[-1, 0], [0, 1]], "A1": [[1, 0], [0, 1]]}})");
  CHECK(sf_endpoints(parse_path(lin)).sf == 1);

  const Json samples = Json::parse(R"({"samples": [{"t": 0, "A": [[1]]}, {"t": 0.5, "A": [[-1]]}, {"t": 1, "A": [[-2]]}]})");
  const OperatorPath p = parse_path(samples);
  CHECK(p.knots().size() == 3);
  CHECK(sf_endpoints(p).sf == -1);

  CHECK_THROWS_AS(parse_path(Json::parse(R"({"linear": {"A0": [[1]]}})")), InputError);
  CHECK_THROWS_AS(parse_path(Json::parse(R"({"linear": {"A0": [[1, 2], [3, 4]], "A1": [[1, 0], [0, 1]]}})")), InputError);
  CHECK_THROWS_AS(parse_path(Json::parse(R"({"samples": [{"t": 0, "A": [[1]]}]})")), InputError);
  CHECK_THROWS_AS(parse_path(Json::parse(R"({"other": 1})")), InputError);
  CHECK_THROWS_AS(parse_path(Json::parse(R"({"linear": {"A0": [["x"]], "A1": [[1]]}})")), InputError);
}

TEST_CASE("tolerance and subspace parsing") {
  const Json j = Json::parse(R"({"tolerance": {"rel_zero": 1e-6}, "V": [[1, 0, 0], [0, 1, 0]]})");
  const auto tol = parse_tolerance(j, Tolerance{});
  REQUIRE(tol);
  CHECK(tol->rel_zero == 1e-6);
  CHECK(parse_subspace(j, "V", 3, *tol).dim() == 2);
  CHECK_THROWS_AS(parse_subspace(j, "V", 4, *tol), InputError);
  CHECK_THROWS_AS(parse_subspace(j, "W", 3, *tol), InputError);
  CHECK_THROWS_AS(parse_tolerance(Json::parse(R"({"tolerance": {"rel_zero": -1}})"), Tolerance{}), InputError);
  CHECK_FALSE(parse_tolerance(Json::parse("{}"), Tolerance{}));
}

TEST_CASE("geodesic scenarios") {
  const Json j = Json::parse(R"({
    "n": 2, "G": [1, -1],
    "Gamma": {"type": "const", "coeffs": [[0, 1], [1, 0]]},
    "Rbar": {"type": "fourier", "coeffs": {"mean": [[-1, 0], [0, 1]], "cos": [[[0.5, 0], [0, 0.5]]]}},
    "modes": 6})");
  const GeodesicScenario g = parse_geodesic(j);
  CHECK(g.frame.n() == 2);
  CHECK(g.frame.n_minus_g() == 1);
  CHECK(g.frame.rbar.max_frequency() == 1);
  REQUIRE(g.modes);
  CHECK(*g.modes == 6);

  CHECK_THROWS_AS(parse_geodesic(Json::parse(R"({"n": 2, "G": [1, 2], "Gamma": {"type": "const", "coeffs": [[0, 0], [0, 0]]}, "Rbar": {"type": "const", "coeffs": [[0, 0], [0, 0]]}})")), InputError);
  CHECK_THROWS_AS(parse_geodesic(Json::parse(R"({"n": 2, "G": [1, 1], "Gamma": {"type": "spline"}, "Rbar": {"type": "const", "coeffs": [[0, 0], [0, 0]]}})")), InputError);
}

TEST_CASE("scenario files and kinds") {
  const TempFile good(R"({"kind": "path", "linear": {"A0": [[-1]], "A1": [[1]]}})", "good");
  CHECK_NOTHROW(load_scenario(good.path.string(), "path"));
  CHECK_THROWS_AS(load_scenario(good.path.string(), "reduce"), InputError);
  const TempFile bad("{not json", "bad");
  CHECK_THROWS_AS(load_scenario(bad.path.string(), "path"), InputError);
  CHECK_THROWS_AS(load_scenario("/nonexistent/sfkit.json", "path"), InputError);
}

TEST_CASE("command runners and exit codes") {
  const TempFile cross(R"({"kind": "path", "linear": {"A0": [[-1, 0], [0, 1]], "A1": [[1, 0], [0, 1]]}})", "cross");
  RunOptions o;
  o.input = cross.path.string();
  RunResult r = guarded([&] { return run_path(o); });
  CHECK(r.exit_code == kExitOk);
  CHECK(r.report["sf"] == 1);
  CHECK(r.report["tool"] == "sfkit");
  CHECK_FALSE(r.report.contains("timings"));

  o.method = "partition";
  CHECK(guarded([&] { return run_path(o); }).report["sf"] == 1);
  o.method = "guess";
  CHECK(guarded([&] { return run_path(o); }).exit_code == kExitInputError);

  RunOptions missing;
  missing.input = "/nonexistent/file.json";
  CHECK(guarded([&] { return run_path(missing); }).exit_code == kExitInputError);

  RunOptions geo;
  geo.example = "sphere_equator";
  geo.modes = 8;
  const RunResult g = guarded([&] { return run_geodesic(geo); });
  CHECK(g.exit_code == kExitOk);
  CHECK(g.report["sf"] == -1);
  CHECK(g.report["residual_periodic"] == 0);

  geo.example = "lorentz_product";
  CHECK(guarded([&] { return run_geodesic(geo); }).exit_code == kExitIdentityViolated);

  geo.example = "constant_curvature";
  geo.curvature = -std::pow(2 * 3.141592653589793 * 3, 2) - 1.0;
  geo.modes = 1;
  CHECK(guarded([&] { return run_geodesic(geo); }).exit_code == kExitNumericalFailure);

  CHECK(list_examples()["examples"].size() == 4);
}

TEST_CASE("random reports are reproducible") {
  RunOptions o;
  o.random = true;
  o.seed = 12;
  o.count = 5;
  o.dim = 7;
  o.codim = 2;
  o.degenerate = true;
  const std::string first = guarded([&] { return run_reduce(o); }).report.dump();
  const std::string second = guarded([&] { return run_reduce(o); }).report.dump();
  CHECK(first == second);
  const RunResult r = guarded([&] { return run_reduce(o); });
  CHECK(r.exit_code == kExitOk);
  CHECK(r.report["trials"].size() == 5);
  CHECK(r.report["failures"] == 0);

  RunOptions v;
  v.random = true;
  v.seed = 3;
  v.count = 3;
  CHECK(guarded([&] { return run_vary(v); }).report.dump() == guarded([&] { return run_vary(v); }).report.dump());
}

TEST_CASE("json helpers") {
  Matrix m(2, 3);
  m << 1, 2, 3, 4, 5, 6;
  CHECK(matrix_from_json(to_json(m), "m") == m);
  CHECK(number(std::nan("")).is_null());
  CHECK_THROWS_AS(matrix_from_json(Json::parse("[[1, 2], [3]]"), "ragged"), InputError);
}
