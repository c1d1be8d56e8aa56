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

#include <optional>
#include <string>

#include "sfkit/geodesics.hpp"
#include "sfkit/json_io.hpp"
#include "sfkit/spectral_flow.hpp"

namespace sfkit::cli {

/// Reads and parses a scenario file; the optional "kind" field must match.
Json load_scenario(const std::string& file, const std::string& kind);

/// Optional {"tolerance": {"rel_zero": x, "abs_zero": y}} override.
std::optional<Tolerance> parse_tolerance(const Json& scenario, const Tolerance& base);

/// {"samples": [{"t", "A"}...]} or {"linear": {"A0", "A1", "a", "b"}}, with an
/// optional shared "gram".
OperatorPath parse_path(const Json& scenario);

/// {"vectors": [[...], ...]} style list under `key`, spanning a subspace of R^n.
Subspace parse_subspace(const Json& scenario, const std::string& key, int n, const Tolerance& tol);

/// {"type": "rotation", "generator": K, "base": [...], "intervals": k} or
/// {"type": "samples", "samples": [{"t", "vectors"}...]}.
SubspacePath parse_family(const Json& scenario, int n, const Tolerance& tol);

struct GeodesicScenario {
  GeodesicFrameData frame;
  std::optional<int> modes;
};

/// {"n", "G": [+-1...], "Gamma": spec, "Rbar": spec, "S": matrix, "modes"}
/// with spec = {"type": "const", "coeffs": M} or
/// {"type": "fourier", "coeffs": {"a0": M, "cos": [M...], "sin": [M...]}}.
GeodesicScenario parse_geodesic(const Json& scenario);

}  // namespace sfkit::cli
