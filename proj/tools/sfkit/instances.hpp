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

#include "sfkit/forms.hpp"
#include "sfkit/grassmann.hpp"
#include "sfkit/random.hpp"
#include "sfkit/spectral_flow.hpp"

namespace sfkit::cli {

/// Random symmetric matrix whose nonzero eigenvalues have modulus in
/// [0.25, 2]; `zeros` eigenvalues are exactly zero before rotation.
Matrix random_form_matrix(Rng& rng, int n, int zeros = 0);

Subspace random_subspace(Rng& rng, int n, int k);

/// Pair with a random common part, so intersections are nontrivial at times.
std::pair<Subspace, Subspace> random_subspace_pair(Rng& rng, int n);

struct ReduceInstance {
  Matrix a0;
  Matrix a1;
  Subspace v;
  bool degenerate = false;

  OperatorPath path() const { return OperatorPath::linear(a0, a1 - a0); }
};

/// Linear path between random endpoints plus a subspace of codimension
/// `codim`. Degenerate instances put kernels at the endpoints and may place
/// kernel or isotropic vectors inside V.
ReduceInstance random_reduce_instance(Rng& rng, int n, int codim, bool degenerate);

struct VaryInstance {
  Matrix a0;
  Matrix a1;
  Matrix v0;       // basis of V_0
  Matrix rotation; // antisymmetric generator K, V_t = exp(tK) V_0
  int intervals = 16;

  OperatorPath path() const { return OperatorPath::linear(a0, a1 - a0); }
  SubspacePath family() const;
};

VaryInstance random_vary_instance(Rng& rng, int n, int codim);

/// Piecewise-linear path through 2..5 random symmetric knots on [0, 1].
OperatorPath random_path(Rng& rng, int n);

struct FormPair {
  SymmetricForm b;
  Subspace v;
};

/// Random form (degenerate half the time) and a subspace that sometimes
/// contains kernel or isotropic vectors.
FormPair random_form_pair(Rng& rng, int n);

}  // namespace sfkit::cli
