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

// Closed-form Jacobi data for frames with Gamma = 0 and constant diagonal G, Rbar.
// Each fiber direction i decouples: v'' = rho_i v, p = eps_i v'.

#include <cmath>
#include <numbers>

#include "sfkit/linalg.hpp"

namespace oracle {

struct JacobiCounts {
  int i_maslov = 0;
  int i_conc = 0;
  int n_per = 0;
  int n0 = 0;
  int dim_per_cap_0 = 0;
  int n_minus_g = 0;
  int sf_periodic() const { return dim_per_cap_0 - i_maslov - i_conc - n_minus_g; }
  int sf_dirichlet() const { return n0 - n_minus_g - i_maslov; }
};

namespace detail {
// omega / pi when it is within 1e-9 of an integer, else -1
inline long half_turns(double omega) {
  const double k = omega / std::numbers::pi;
  const double r = std::round(k);
  return std::abs(k - r) < 1e-9 ? static_cast<long>(r) : -1;
}
}  // namespace detail

inline JacobiCounts jacobi_counts(const sfkit::Vector& eps, const sfkit::Vector& rho) {
  JacobiCounts out;
  for (Eigen::Index i = 0; i < eps.size(); ++i) {
    const double e = eps(i);
    const double r = rho(i);
    if (e < 0) ++out.n_minus_g;
    if (r == 0.0) {
      // v = v0 + e t p0
      out.n_per += 1;
      continue;
    }
    if (r > 0.0) {
      // M = 2 e w (cosh w - 1) / sinh w on the one-dimensional J*
      if (e < 0) out.i_conc += 1;
      continue;
    }
    const double w = std::sqrt(-r);
    // zeros of sin(w t) in (0, 1], each crossing has sign e
    const long zeros = static_cast<long>(std::floor(w / std::numbers::pi + 1e-9));
    out.i_maslov += static_cast<int>(zeros) * (e > 0 ? 1 : -1);
    const long k = detail::half_turns(w);
    if (k > 0) {
      out.n0 += 1;
      if (k % 2 == 0) {
        out.n_per += 2;
        out.dim_per_cap_0 += 1;
      }
      continue;
    }
    // M = -2 e w (1 - cos w) / sin w
    if (e * std::sin(w) > 0) out.i_conc += 1;
  }
  out.i_maslov += out.n_minus_g;
  return out;
}

}  // namespace oracle
