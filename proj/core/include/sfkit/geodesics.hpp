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
#include <vector>

#include "sfkit/forms.hpp"
#include "sfkit/grassmann.hpp"
#include "sfkit/spectral_flow.hpp"

namespace sfkit {

/// t -> n x n matrix, either constant or a real Fourier series of period 1:
/// mean + sum_k cos_k cos(2 pi k t) + sin_k sin(2 pi k t).
class CoefficientSpec {
 public:
  CoefficientSpec() = default;
  static CoefficientSpec constant(Matrix value);
  static CoefficientSpec fourier(Matrix mean, std::vector<Matrix> cos_terms,
                                 std::vector<Matrix> sin_terms);
  static CoefficientSpec zero(int n) { return constant(Matrix::Zero(n, n)); }

  Matrix at(double t) const;
  int dim() const { return static_cast<int>(mean_.rows()); }
  int max_frequency() const;
  bool is_constant() const { return cos_.empty() && sin_.empty(); }
  bool is_zero() const;

  const Matrix& mean() const { return mean_; }
  const std::vector<Matrix>& cos_terms() const { return cos_; }
  const std::vector<Matrix>& sin_terms() const { return sin_; }

  /// All coefficient matrices (mean first), for linear checks.
  std::vector<Matrix> coefficients() const;

 private:
  Matrix mean_;
  std::vector<Matrix> cos_;
  std::vector<Matrix> sin_;
};

/// Frame data along a closed geodesic: metric signature G (diagonal +-1),
/// frame Christoffel symbol Gamma_t, pulled-back curvature Rbar_t and an
/// optional holonomy S (identity when absent).
struct GeodesicFrameData {
  Vector signature;
  CoefficientSpec gamma;
  CoefficientSpec rbar;
  std::optional<Matrix> holonomy;

  int n() const { return static_cast<int>(signature.size()); }
  Matrix metric() const;
  int n_minus_g() const;

  /// G^2 = I, G Rbar symmetric, G Gamma + Gamma^T G = 0, S^T G S = G.
  void validate() const;
};

GeodesicFrameData make_frame(Vector signature, CoefficientSpec gamma, CoefficientSpec rbar,
                             std::optional<Matrix> holonomy = std::nullopt);

/// Same frame with Rbar replaced by Rbar + eps * I (keeps G-symmetry); used to
/// move off degenerate crossings.
GeodesicFrameData shift_curvature(const GeodesicFrameData& frame, double eps);

struct ExampleParams {
  std::optional<int> n;
  std::optional<double> curvature;
  std::optional<Vector> signature;
  std::optional<Matrix> rbar;
};

/// Catalog: flat_torus, sphere_equator, lorentz_product, constant_curvature.
GeodesicFrameData example_frame(const std::string& name, const ExampleParams& params = {});

struct CatalogEntry {
  std::string name;
  std::string description;
  std::string expected;
};
std::vector<CatalogEntry> example_catalog();

/// Truncated H^1 space spanned by {1, sqrt2 cos 2 pi k r, sqrt2 sin 2 pi k r}
/// (k <= modes) tensored with R^n, inner product V(0).W(0) + int V'.W'.
/// With a twist S, each basis field W is replaced by W + r (S - I) W(0), which
/// spans {V : V(1) = S V(0)}.
class GalerkinSpace {
 public:
  GalerkinSpace(int n, int modes, std::optional<Matrix> twist = std::nullopt);

  int fiber_dim() const { return n_; }
  int modes() const { return modes_; }
  int scalar_count() const { return 2 * modes_ + 1; }
  int dim() const { return n_ * scalar_count(); }
  const std::optional<Matrix>& twist() const { return twist_; }

  /// n x dim matrices of basis field values / derivatives at r.
  Matrix values(double r) const;
  Matrix derivatives(double r) const;
  /// n x dim evaluation-at-zero functional.
  Matrix eval_at_zero() const;
  const Matrix& gram() const { return gram_; }
  /// ker(eval_at_zero), i.e. fields vanishing at both ends.
  Subspace dirichlet(const Tolerance& tol = {}) const;

  GalerkinSpace refined() const { return GalerkinSpace(n_, 2 * modes_, twist_); }

 private:
  int n_;
  int modes_;
  std::optional<Matrix> twist_;
  Matrix gram_;
};

/// Galerkin matrix of B_t (Gram attached). B_0 keeps only int G(V', W').
SymmetricForm assemble_B(double t, const GalerkinSpace& space, const GeodesicFrameData& frame);

/// Matrix of V -> G V on a periodic space.
SymmetryOperator symmetry_J(const GalerkinSpace& space, const GeodesicFrameData& frame);

/// t -> B_t as an operator path on [0, 1].
OperatorPath geodesic_path(const GalerkinSpace& space, const GeodesicFrameData& frame);

struct GalerkinOptions {
  /// Compare against the doubled mode count and fail if the counts differ.
  bool check_refinement = true;
  /// Samples of t -> B_t used for the symmetry and Lipschitz diagnostics.
  int samples = 33;
  Tolerance tol = {};
};

struct GalerkinFlow {
  int sf = 0;
  int modes = 0;
  int sf_at_modes = 0;
  /// Equal to sf_at_modes when the refinement check is off.
  int sf_at_double = 0;
  FlowReport flow;
};

GalerkinFlow sf_geodesic(const GeodesicFrameData& frame, const GalerkinSpace& space,
                         const GalerkinOptions& options = {});
GalerkinFlow sf_dirichlet(const GeodesicFrameData& frame, const GalerkinSpace& space,
                          const GalerkinOptions& options = {});

struct JacobiOptions {
  double abs_tol = 1e-11;
  double rel_tol = 1e-11;
  /// Required bound on ||Phi^T Omega Phi - Omega||.
  double symplectic_limit = 1e-8;
  /// Re-integration at tighter tolerance; the difference at t = 1 is reported.
  bool richardson_check = true;
  double richardson_limit = 1e-6;
  /// Grid for locating conjugate instants.
  int scan_points = 512;
  /// Relative thresholds for kernels of matrices built from the flow.
  Tolerance flow_tol = {1e-7, 1e-9};
};

/// Fundamental solutions of v' = G p - Gamma v, p' = G Rbar v - G Gamma G p.
struct JacobiFlow {
  std::vector<double> times;
  std::vector<Matrix> phi;
  double symplectic_residual = 0.0;
  double richardson_residual = 0.0;
};

JacobiFlow jacobi_fundamental(const GeodesicFrameData& frame, std::vector<double> grid,
                              const JacobiOptions& options = {});

/// 2n x 2n matrix of the pairing p2.v1 - p1.v2.
Matrix symplectic_form(int n);

struct ConjugateInstant {
  double t = 0.0;
  int multiplicity = 0;
  /// Signature of the crossing form on ker V(t).
  int signature = 0;
};

/// Zeros in (0, 1] of V(t), the upper-right block of Phi_t.
std::vector<ConjugateInstant> conjugate_instants(const GeodesicFrameData& frame,
                                                 const JacobiOptions& options = {});

/// n_-(g) plus the crossing-form signatures over the conjugate instants.
int maslov_index(const GeodesicFrameData& frame, const JacobiOptions& options = {});
int concavity_index(const GeodesicFrameData& frame, const JacobiOptions& options = {});

struct JacobiNullities {
  int n_per = 0;
  int n0 = 0;
  int dim_per_cap_0 = 0;
};

JacobiNullities jacobi_nullities(const GeodesicFrameData& frame, const JacobiOptions& options = {});

struct GeodesicReport {
  int sf = 0;
  int sf_dirichlet = 0;
  int i_maslov = 0;
  int i_conc = 0;
  int n_per = 0;
  int n0 = 0;
  int dim_per_cap_0 = 0;
  int n_minus_g = 0;
  /// sf - (dim_per_cap_0 - i_maslov - i_conc - n_minus_g).
  int residual_periodic = 0;
  /// sf_dirichlet - (n0 - n_minus_g - i_maslov).
  int residual_dirichlet = 0;
  std::vector<ConjugateInstant> conjugate_instants;
  int modes = 0;
  int sf_at_modes = 0;
  int sf_at_double = 0;
  int sf_dirichlet_at_double = 0;
  /// Nullity of the assembled B_1 (compare with n_per).
  int galerkin_kernel = 0;
  double symplectic_residual = 0.0;
  double richardson_residual = 0.0;
  double max_asymmetry = 0.0;
  double lipschitz_bound = 0.0;
  std::vector<std::string> warnings;

  bool holds() const { return residual_periodic == 0 && residual_dirichlet == 0; }
};

GeodesicReport verify_periodic_formula(const GeodesicFrameData& frame, int modes,
                                       const GalerkinOptions& galerkin = {},
                                       const JacobiOptions& jacobi = {});

struct TwistedFlow {
  int sf_s = 0;
  int n_s = 0;
  int sf = 0;
};

/// Spectral flow on {V : V(1) = S V(0)} with S the frame holonomy, the index
/// n_S of g on range(S - I), and their difference.
TwistedFlow sf_twisted(const GeodesicFrameData& frame, int modes, const GalerkinOptions& options = {});

}  // namespace sfkit
