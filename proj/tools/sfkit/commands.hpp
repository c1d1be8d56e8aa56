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

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "sfkit/json_io.hpp"
#include "sfkit/linalg.hpp"

namespace sfkit::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitIdentityViolated = 1,
  kExitInputError = 2,
  kExitNumericalFailure = 3,
};

struct RunOptions {
  std::optional<std::string> input;
  std::optional<std::string> example;
  bool random = false;
  int dim = 8;
  int codim = 2;
  std::uint64_t seed = 0;
  int count = 1;
  bool degenerate = false;
  std::string method = "endpoints";
  std::optional<int> modes;
  std::optional<double> curvature;
  std::optional<int> fiber_dim;
  std::optional<std::string> trace;
  Tolerance tol = {};
  /// "default", "env" or "cli"; reported alongside the tolerance.
  std::string tol_source = "default";
  bool timings = false;
};

struct RunResult {
  int exit_code = kExitOk;
  Json report;
};

RunResult run_path(const RunOptions& options);
RunResult run_reduce(const RunOptions& options);
RunResult run_vary(const RunOptions& options);
RunResult run_geodesic(const RunOptions& options);
RunResult run_grassmann(const RunOptions& options);

/// Catalog of example frames with expected invariants.
Json list_examples();

/// Runs `command`, mapping input errors to exit 2 and numerical failures to
/// exit 3; on failure the report carries "error" and "exit_code".
RunResult guarded(const std::function<RunResult()>& command);

/// Reads SFKIT_TOL; throws InputError on an unparsable value.
std::optional<double> tolerance_from_env();

}  // namespace sfkit::cli
