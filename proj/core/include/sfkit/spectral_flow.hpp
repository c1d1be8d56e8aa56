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

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sfkit/forms.hpp"
#include "sfkit/grassmann.hpp"

namespace sfkit {

/// Continuous path t in [a, b] -> SymmetricForm.
class OperatorPath {
 public:
  using Evaluator = std::function<SymmetricForm(double)>;

  OperatorPath(double a, double b, int dim, Evaluator evaluator);

  /// Piecewise-linear interpolation of the form matrices; the optional Gram
  /// matrix is shared by every sample.
  static OperatorPath from_samples(std::vector<double> times, std::vector<Matrix> forms,
                                   std::optional<Matrix> gram = std::nullopt);
  /// t -> base + t * slope on [a, b].
  static OperatorPath linear(Matrix base, Matrix slope, double a = 0.0, double b = 1.0,
                             std::optional<Matrix> gram = std::nullopt);

  double start() const { return a_; }
  double end() const { return b_; }
  int dim() const { return dim_; }
  SymmetricForm at(double t) const;

  /// Same evaluator on a sub-interval of the domain.
  OperatorPath slice(double a, double b) const;
  /// t -> restrict(T_t, V).
  OperatorPath restricted(const Subspace& v) const;
  /// Sample times when the path was built from samples (empty otherwise).
  const std::vector<double>& knots() const { return knots_; }

 private:
  double a_ = 0.0;
  double b_ = 1.0;
  int dim_ = 0;
  Evaluator evaluator_;
  std::vector<double> knots_;
};

enum class FlowMethod { kEndpoints, kPartition, kRestricted, kVarying };

std::string to_string(FlowMethod method);

/// One cell of a Phillips partition: on [t_begin, t_end] no eigenvalue meets
/// +-threshold and the count inside [-threshold, threshold] stays fixed.
struct PartitionCell {
  double t_begin = 0.0;
  double t_end = 0.0;
  double threshold = 0.0;
  /// Smallest distance from a sampled eigenvalue to +-threshold.
  double margin = 0.0;
  int rank_begin = 0;  // rk chi_[0, a](T_{t_begin})
  int rank_end = 0;    // rk chi_[0, a](T_{t_end})
};

struct FlowReport {
  int sf = 0;
  FlowMethod method = FlowMethod::kEndpoints;
  int nullity_start = 0;
  int nullity_end = 0;
  int n_minus_start = 0;
  int n_minus_end = 0;
  /// Minimal distance of the endpoint spectra to the zero band.
  double min_endpoint_gap = 0.0;
  std::vector<PartitionCell> partition;
  std::vector<std::string> warnings;

  bool degenerate_endpoint() const { return nullity_start > 0 || nullity_end > 0; }
};

/// sf = n_-(T_a) - n_-(T_b), i.e. the relative dimension of the negative
/// spaces at the endpoints; kernel eigenvalues count as nonnegative.
FlowReport sf_endpoints(const OperatorPath& path, const Tolerance& tol = {});

struct PartitionOptions {
  /// Check points per sub-interval (inclusive of both ends).
  int check_points = 64;
  /// Maximum bisection depth below the whole domain.
  int max_depth = 20;
  /// Depth from which a window above every sampled eigenvalue of the cell is
  /// accepted; shallower cells must find a gap inside their spectrum.
  int global_window_depth = 4;
};

/// Phillips partition construction. Throws NumericalFailure when no feasible
/// threshold is found within the refinement budget.
FlowReport sf_partition(const OperatorPath& path, const PartitionOptions& options = {},
                        const Tolerance& tol = {});

FlowReport sf_restricted(const OperatorPath& path, const Subspace& v, const Tolerance& tol = {});

struct ReductionReport {
  int sf_full = 0;
  int sf_restricted = 0;
  /// sf(T) - sf(T restricted to V).
  int lhs = 0;
  /// terms_start.total() - terms_end.total().
  int rhs = 0;
  RestrictionTerms terms_start;
  RestrictionTerms terms_end;
  std::vector<std::string> warnings;

  bool holds() const { return lhs == rhs; }
};

ReductionReport verify_reduction(const OperatorPath& path, const Subspace& v,
                                 const Tolerance& tol = {});

struct VaryingFlow {
  FlowReport flow;
  LiftedPath lift;
  /// Endpoint forms of t -> (Phi_t Q)^T T_t (Phi_t Q), Q a basis of V_ref.
  SymmetricForm reduced_start;
  SymmetricForm reduced_end;
};

/// Spectral flow on the varying domains V_t through an orthogonal
/// trivialization lifted from `family` (identity initial map by default).
VaryingFlow sf_varying(const OperatorPath& path, const SubspacePath& family,
                       const std::optional<Matrix>& initial = std::nullopt,
                       const LiftOptions& lift = {}, const Tolerance& tol = {});

struct VaryingReductionReport {
  int sf_full = 0;
  int sf_varying = 0;
  int lhs = 0;
  int rhs = 0;
  /// dim(V^-(T_a), V^-(T~_a)) and the same at b.
  int relative_dim_start = 0;
  int relative_dim_end = 0;
  /// Same boundary quantity through restriction_terms at V_a and V_b.
  int rhs_by_terms = 0;
  int lift_refinements = 0;

  bool holds() const { return lhs == rhs; }
};

VaryingReductionReport verify_reduction_varying(const OperatorPath& path, const SubspacePath& family,
                                                const std::optional<Matrix>& initial = std::nullopt,
                                                const LiftOptions& lift = {},
                                                const Tolerance& tol = {});

/// t -> S_t^T T_t S_t with the Gram matrix transformed the same way.
OperatorPath cogredient_transform(const OperatorPath& path, std::function<Matrix(double)> s);
/// Grid version: S is interpolated linearly between the given times.
OperatorPath cogredient_transform(const OperatorPath& path, std::vector<double> times,
                                  std::vector<Matrix> s);

/// Writes rows "t,lambda_1,...,lambda_N" for `samples` uniform times.
void write_eigenvalue_trace(std::ostream& out, const OperatorPath& path, int samples,
                            const Tolerance& tol = {});

}  // namespace sfkit
