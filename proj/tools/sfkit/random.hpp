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
#include <random>

#include "sfkit/linalg.hpp"

namespace sfkit::cli {

/// Seeded generator whose output is identical across standard libraries: the
/// engine is mt19937_64 and the conversions to doubles are done here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [lo, hi].
  int integer(int lo, int hi);
  bool coin(double p = 0.5) { return uniform() < p; }
  /// Standard normal (Box-Muller).
  double normal();

  Matrix gaussian(int rows, int cols);
  /// Haar-like orthogonal matrix from the QR factorization of a Gaussian.
  Matrix orthogonal(int n);
  /// Q diag(eigenvalues) Q^T with a random orthogonal Q.
  Matrix symmetric_with_spectrum(const Vector& eigenvalues);
  /// Random antisymmetric matrix with operator norm `scale`.
  Matrix antisymmetric(int n, double scale);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace sfkit::cli
