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

#include "sfkit/scenario.hpp"

#include <fstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "sfkit/errors.hpp"

namespace sfkit::cli {

Json load_scenario(const std::string& file, const std::string& kind) {
  std::ifstream in(file);
  if (!in) throw InputError("cannot open scenario file '" + file + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InputError(file + ": invalid JSON: " + e.what());
  }
  if (!j.is_object()) throw InputError(file + ": scenario must be a JSON object");
  if (j.contains("kind")) {
    if (!j["kind"].is_string() || j["kind"].get<std::string>() != kind) {
      throw InputError(file + ": scenario kind is " + j["kind"].dump() + ", expected \"" + kind + "\"");
    }
  }
  return j;
}

std::optional<Tolerance> parse_tolerance(const Json& scenario, const Tolerance& base) {
  if (!scenario.contains("tolerance")) return std::nullopt;
  const Json& t = scenario["tolerance"];
  if (!t.is_object()) throw InputError("tolerance: expected an object");
  Tolerance tol = base;
  if (t.contains("rel_zero")) tol.rel_zero = number_field(t, "rel_zero", "tolerance");
  if (t.contains("abs_zero")) tol.abs_zero = number_field(t, "abs_zero", "tolerance");
  tol.validate();
  return tol;
}

OperatorPath parse_path(const Json& scenario) {
  std::optional<Matrix> gram;
  if (scenario.contains("gram")) gram = matrix_from_json(scenario["gram"], "gram");
  if (scenario.contains("samples")) {
    const Json& samples = scenario["samples"];
    if (!samples.is_array() || samples.size() < 2) throw InputError("samples: expected at least two samples");
    std::vector<double> times;
    std::vector<Matrix> forms;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const std::string where = "samples[" + std::to_string(i) + "]";
      times.push_back(number_field(samples[i], "t", where));
      forms.push_back(matrix_from_json(require_field(samples[i], "A", where), where + ".A"));
    }
    return OperatorPath::from_samples(std::move(times), std::move(forms), std::move(gram));
  }
  if (scenario.contains("linear")) {
    const Json& lin = scenario["linear"];
    const Matrix a0 = matrix_from_json(require_field(lin, "A0", "linear"), "linear.A0");
    const Matrix a1 = matrix_from_json(require_field(lin, "A1", "linear"), "linear.A1");
    const double a = lin.contains("a") ? number_field(lin, "a", "linear") : 0.0;
    const double b = lin.contains("b") ? number_field(lin, "b", "linear") : 1.0;
    if (a0.rows() != a1.rows() || a0.cols() != a1.cols()) throw InputError("linear: A0 and A1 differ in size");
    if (!(b > a)) throw InputError("linear: need a < b");
    // Endpoint values A0 at a and A1 at b.
    return OperatorPath::from_samples({a, b}, {a0, a1}, std::move(gram));
  }
  throw InputError("path scenario: missing required field 'samples' or 'linear'");
}

Subspace parse_subspace(const Json& scenario, const std::string& key, int n, const Tolerance& tol) {
  const Json& vectors = require_field(scenario, key, "scenario");
  return Subspace::span(columns_from_json(vectors, n, key), tol);
}

SubspacePath parse_family(const Json& scenario, int n, const Tolerance& tol) {
  const Json& family = require_field(scenario, "family", "vary scenario");
  const Json& type = require_field(family, "type", "family");
  if (type == "rotation") {
    const Matrix k = matrix_from_json(require_field(family, "generator", "family"), "family.generator");
    if (k.rows() != n || k.cols() != n) throw InputError("family.generator: expected " + std::to_string(n) + "x" + std::to_string(n));
    if ((k + k.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, k.cwiseAbs().maxCoeff())) {
      throw InputError("family.generator: must be antisymmetric");
    }
    const Matrix base = columns_from_json(require_field(family, "base", "family"), n, "family.base");
    const int intervals = family.contains("intervals") ? integer_field(family, "intervals", "family") : 16;
    if (intervals < 1) throw InputError("family.intervals: must be positive");
    const double a = family.contains("a") ? number_field(family, "a", "family") : 0.0;
    const double b = family.contains("b") ? number_field(family, "b", "family") : 1.0;
    return SubspacePath::sample(
        [k, base, a, tol](double t) { return Subspace::span(((t - a) * k).exp() * base, tol); }, a, b,
        intervals);
  }
  if (type == "samples") {
    const Json& samples = require_field(family, "samples", "family");
    if (!samples.is_array() || samples.empty()) throw InputError("family.samples: expected a non-empty array");
    SubspacePath path;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const std::string where = "family.samples[" + std::to_string(i) + "]";
      path.times.push_back(number_field(samples[i], "t", where));
      path.subspaces.push_back(Subspace::span(
          columns_from_json(require_field(samples[i], "vectors", where), n, where + ".vectors"), tol));
    }
    path.validate();
    return path;
  }
  throw InputError("family.type: expected \"rotation\" or \"samples\"");
}

namespace {

CoefficientSpec parse_coefficients(const Json& scenario, const std::string& key, int n) {
  if (!scenario.contains(key)) return CoefficientSpec::zero(n);
  const Json& spec = scenario[key];
  const Json& type = require_field(spec, "type", key);
  const Json& coeffs = require_field(spec, "coeffs", key);
  auto square = [n](Matrix m, const std::string& where) {
    if (m.rows() != n || m.cols() != n) {
      throw InputError(where + ": expected " + std::to_string(n) + "x" + std::to_string(n));
    }
    return m;
  };
  if (type == "const") return CoefficientSpec::constant(square(matrix_from_json(coeffs, key + ".coeffs"), key + ".coeffs"));
  if (type == "fourier") {
    const std::string where = key + ".coeffs";
    Matrix a0 = coeffs.contains("a0") ? square(matrix_from_json(coeffs["a0"], where + ".a0"), where + ".a0")
                                      : Matrix::Zero(n, n);
    std::vector<Matrix> cos_terms, sin_terms;
    for (const auto& [name, list] : {std::pair{"cos", &cos_terms}, std::pair{"sin", &sin_terms}}) {
      if (!coeffs.contains(name)) continue;
      const Json& arr = coeffs[name];
      if (!arr.is_array()) throw InputError(where + "." + name + ": expected a list of matrices");
      for (std::size_t k = 0; k < arr.size(); ++k) {
        const std::string w = where + "." + name + "[" + std::to_string(k) + "]";
        list->push_back(square(matrix_from_json(arr[k], w), w));
      }
    }
    return CoefficientSpec::fourier(std::move(a0), std::move(cos_terms), std::move(sin_terms));
  }
  throw InputError(key + ".type: expected \"const\" or \"fourier\"");
}

}  // namespace

GeodesicScenario parse_geodesic(const Json& scenario) {
  const int n = integer_field(scenario, "n", "geodesic scenario");
  if (n < 1) throw InputError("n: must be positive");
  const Vector g = vector_from_json(require_field(scenario, "G", "geodesic scenario"), "G");
  if (g.size() != n) throw InputError("G: expected " + std::to_string(n) + " entries");
  std::optional<Matrix> s;
  if (scenario.contains("S")) s = matrix_from_json(scenario["S"], "S");
  GeodesicScenario out{make_frame(g, parse_coefficients(scenario, "Gamma", n),
                                  parse_coefficients(scenario, "Rbar", n), std::move(s)),
                       std::nullopt};
  if (scenario.contains("modes")) {
    out.modes = integer_field(scenario, "modes", "geodesic scenario");
    if (*out.modes < 1) throw InputError("modes: must be positive");
  }
  return out;
}

}  // namespace sfkit::cli
