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

#include "sfkit/geodesics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "sfkit/errors.hpp"

namespace sfkit {
namespace {

namespace odeint = boost::numeric::odeint;

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kQuadratureOrder = 16;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Legendre on [-1, 1] by Newton iteration on P_order.
QuadratureRule gauss_legendre(int order) {
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(order));
  rule.weights.resize(static_cast<std::size_t>(order));
  for (int i = 0; i < (order + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(order - 1 - i);
    rule.nodes[lo] = -x;
    rule.nodes[hi] = x;
    rule.weights[lo] = w;
    rule.weights[hi] = w;
  }
  return rule;
}

// Composite rule on [0, 1] with equal panels.
QuadratureRule composite_rule(int panels) {
  static const QuadratureRule base = gauss_legendre(kQuadratureOrder);
  QuadratureRule out;
  const double h = 1.0 / panels;
  for (int p = 0; p < panels; ++p) {
    for (std::size_t k = 0; k < base.nodes.size(); ++k) {
      out.nodes.push_back(h * (p + 0.5 * (base.nodes[k] + 1.0)));
      out.weights.push_back(0.5 * h * base.weights[k]);
    }
  }
  return out;
}

// One panel per oscillation of the highest frequency in the integrand.
int panels_for(int frequency) { return std::max(4, frequency + 2); }

// Values of the scalar basis {1, sqrt2 cos 2 pi k r, sqrt2 sin 2 pi k r}.
void scalar_basis(int modes, double r, Vector& value, Vector& slope) {
  value.resize(2 * modes + 1);
  slope.resize(2 * modes + 1);
  value(0) = 1.0;
  slope(0) = 0.0;
  for (int k = 1; k <= modes; ++k) {
    const double w = kTwoPi * k;
    const double c = std::cos(w * r);
    const double s = std::sin(w * r);
    value(2 * k - 1) = std::numbers::sqrt2 * c;
    value(2 * k) = std::numbers::sqrt2 * s;
    slope(2 * k - 1) = -std::numbers::sqrt2 * w * s;
    slope(2 * k) = std::numbers::sqrt2 * w * c;
  }
}

// Kernel of m with singular values compared against abs + rel * scale.
Matrix scaled_kernel(const Matrix& m, double scale, const Tolerance& tol) {
  const Eigen::Index cols = m.cols();
  if (m.rows() == 0) return Matrix::Identity(cols, cols);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > tol.band(scale)) ++rank;
  return svd.matrixV().rightCols(cols - rank);
}

double flow_scale(const Matrix& m) { return std::max(1.0, norm2(m)); }

// Extended precision for the flow: Phi grows like exp(sqrt(c) t) on
// hyperbolic data and Phi^T Omega Phi cancels down to O(1).
using Real = long double;
using MatrixX = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using StateX = std::vector<Real>;

// Jacobi system in first-order form, acting on the full 2n x 2n matrix.
class JacobiSystem {
 public:
  explicit JacobiSystem(const GeodesicFrameData& frame)
      : frame_(frame), n_(frame.n()), g_(frame.metric()) {
    if (frame.gamma.is_constant() && frame.rbar.is_constant()) constant_ = generator(0.0);
  }

  MatrixX generator(Real t) const {
    const Matrix gamma = frame_.gamma.at(static_cast<double>(t));
    const Matrix rbar = frame_.rbar.at(static_cast<double>(t));
    Matrix a(2 * n_, 2 * n_);
    a.topLeftCorner(n_, n_) = -gamma;
    a.topRightCorner(n_, n_) = g_;
    a.bottomLeftCorner(n_, n_) = g_ * rbar;
    a.bottomRightCorner(n_, n_) = -g_ * gamma * g_;
    return a.cast<Real>();
  }

  void operator()(const StateX& x, StateX& dxdt, Real t) const {
    const int m = 2 * n_;
    Eigen::Map<const MatrixX> state(x.data(), m, m);
    Eigen::Map<MatrixX> rate(dxdt.data(), m, m);
    if (constant_) {
      rate.noalias() = *constant_ * state;
    } else {
      rate.noalias() = generator(t) * state;
    }
  }

 private:
  const GeodesicFrameData& frame_;
  int n_;
  Matrix g_;
  std::optional<MatrixX> constant_;
};

// Integrates from (times.front(), start) and returns the state at every time.
std::vector<MatrixX> propagate_ext(const GeodesicFrameData& frame, const MatrixX& start,
                                   const std::vector<double>& times, double abs_tol, double rel_tol) {
  const Eigen::Index m = start.rows();
  StateX x(start.data(), start.data() + start.size());
  std::vector<MatrixX> out;
  out.reserve(times.size());
  if (times.size() == 1) {
    out.push_back(start);
    return out;
  }
  const std::vector<Real> when(times.begin(), times.end());
  JacobiSystem system(frame);
  auto stepper = odeint::make_dense_output(static_cast<Real>(abs_tol), static_cast<Real>(rel_tol),
                                           odeint::runge_kutta_dopri5<StateX, Real>());
  try {
    odeint::integrate_times(stepper, std::ref(system), x, when.begin(), when.end(), static_cast<Real>(1e-3),
                            [&](const StateX& s, Real) { out.push_back(Eigen::Map<const MatrixX>(s.data(), m, m)); });
  } catch (const std::exception& e) {
    throw NumericalFailure(std::string("jacobi flow: integration failed: ") + e.what());
  }
  return out;
}

std::vector<Matrix> propagate(const GeodesicFrameData& frame, const Matrix& start,
                              const std::vector<double>& times, double abs_tol, double rel_tol) {
  std::vector<Matrix> out;
  for (const MatrixX& m : propagate_ext(frame, start.cast<Real>(), times, abs_tol, rel_tol)) {
    out.push_back(m.cast<double>());
  }
  return out;
}

Matrix upper_right(const Matrix& phi, int n) { return phi.topRightCorner(n, n); }

struct GalerkinEndpoints {
  SymmetricForm b0;
  SymmetricForm b1;
};

GalerkinEndpoints endpoint_forms(const GalerkinSpace& space, const GeodesicFrameData& frame) {
  return {assemble_B(0.0, space, frame), assemble_B(1.0, space, frame)};
}

OperatorPath endpoint_path(const GalerkinEndpoints& ends) {
  return OperatorPath::from_samples({0.0, 1.0}, {ends.b0.matrix(), ends.b1.matrix()},
                                    ends.b0.gram_if_any());
}

FlowReport periodic_flow(const GalerkinEndpoints& ends, const Tolerance& tol) {
  return sf_endpoints(endpoint_path(ends), tol);
}

FlowReport dirichlet_flow(const GalerkinEndpoints& ends, const GalerkinSpace& space,
                          const Tolerance& tol) {
  return sf_restricted(endpoint_path(ends), space.dirichlet(tol), tol);
}

void require_stable(int coarse, int fine, int modes, const char* what) {
  if (coarse != fine) {
    throw NumericalFailure(std::string(what) + ": Galerkin spectral flow changed from " +
                           std::to_string(coarse) + " at m=" + std::to_string(modes) + " to " +
                           std::to_string(fine) + " at m=" + std::to_string(2 * modes) +
                           "; increase --modes");
  }
}

void require_fiber(const GalerkinSpace& space, const GeodesicFrameData& frame) {
  if (space.fiber_dim() != frame.n()) throw InputError("Galerkin space and frame differ in dimension");
}

}  // namespace

// ---------------------------------------------------------------------------
// Coefficient data and frames

CoefficientSpec CoefficientSpec::constant(Matrix value) {
  require_square(value, "coefficient");
  require_finite(value, "coefficient");
  CoefficientSpec out;
  out.mean_ = std::move(value);
  return out;
}

CoefficientSpec CoefficientSpec::fourier(Matrix mean, std::vector<Matrix> cos_terms,
                                         std::vector<Matrix> sin_terms) {
  CoefficientSpec out = constant(std::move(mean));
  const auto n = out.mean_.rows();
  for (const auto* list : {&cos_terms, &sin_terms}) {
    for (const Matrix& m : *list) {
      require_finite(m, "Fourier coefficient");
      if (m.rows() != n || m.cols() != n) throw InputError("Fourier coefficients differ in size");
    }
  }
  out.cos_ = std::move(cos_terms);
  out.sin_ = std::move(sin_terms);
  return out;
}

Matrix CoefficientSpec::at(double t) const {
  Matrix out = mean_;
  for (std::size_t k = 0; k < cos_.size(); ++k) out += std::cos(kTwoPi * (k + 1.0) * t) * cos_[k];
  for (std::size_t k = 0; k < sin_.size(); ++k) out += std::sin(kTwoPi * (k + 1.0) * t) * sin_[k];
  return out;
}

int CoefficientSpec::max_frequency() const {
  return static_cast<int>(std::max(cos_.size(), sin_.size()));
}

bool CoefficientSpec::is_zero() const {
  for (const Matrix& m : coefficients()) {
    if (m.size() > 0 && m.cwiseAbs().maxCoeff() != 0.0) return false;
  }
  return true;
}

std::vector<Matrix> CoefficientSpec::coefficients() const {
  std::vector<Matrix> all{mean_};
  all.insert(all.end(), cos_.begin(), cos_.end());
  all.insert(all.end(), sin_.begin(), sin_.end());
  return all;
}

Matrix GeodesicFrameData::metric() const { return signature.asDiagonal(); }

int GeodesicFrameData::n_minus_g() const {
  return static_cast<int>((signature.array() < 0.0).count());
}

void GeodesicFrameData::validate() const {
  const int dim = n();
  if (dim < 1) throw InputError("frame: fiber dimension must be positive");
  for (double e : signature) {
    if (e != 1.0 && e != -1.0) throw InputError("frame: metric signature entries must be +1 or -1");
  }
  if (gamma.dim() != dim || rbar.dim() != dim) {
    throw InputError("frame: Gamma and Rbar must be " + std::to_string(dim) + "x" + std::to_string(dim));
  }
  const Matrix g = metric();
  // Both conditions are linear in the coefficients, so checking every
  // Fourier coefficient is equivalent to checking every t.
  for (const Matrix& r : rbar.coefficients()) {
    const Matrix gr = g * r;
    if ((gr - gr.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, r.cwiseAbs().maxCoeff())) {
      throw InputError("frame: G * Rbar is not symmetric");
    }
  }
  for (const Matrix& c : gamma.coefficients()) {
    if ((g * c + c.transpose() * g).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, c.cwiseAbs().maxCoeff())) {
      throw InputError("frame: Gamma is not G-antisymmetric (G Gamma + Gamma^T G != 0)");
    }
  }
  if (holonomy) {
    const Matrix& s = *holonomy;
    require_finite(s, "holonomy");
    if (s.rows() != dim || s.cols() != dim) throw InputError("frame: holonomy has the wrong size");
    const double scale = std::max(1.0, s.squaredNorm());
    if ((s.transpose() * g * s - g).cwiseAbs().maxCoeff() > 1e-10 * scale) {
      throw InputError("frame: holonomy does not preserve the metric (S^T G S != G)");
    }
  }
}

GeodesicFrameData make_frame(Vector signature, CoefficientSpec gamma, CoefficientSpec rbar,
                             std::optional<Matrix> holonomy) {
  GeodesicFrameData frame{std::move(signature), std::move(gamma), std::move(rbar), std::move(holonomy)};
  frame.validate();
  return frame;
}

GeodesicFrameData shift_curvature(const GeodesicFrameData& frame, double eps) {
  const int n = frame.n();
  const Matrix shift = eps * Matrix::Identity(n, n);
  CoefficientSpec rbar = CoefficientSpec::fourier(frame.rbar.mean() + shift, frame.rbar.cos_terms(),
                                                  frame.rbar.sin_terms());
  return make_frame(frame.signature, frame.gamma, std::move(rbar), frame.holonomy);
}

GeodesicFrameData example_frame(const std::string& name, const ExampleParams& params) {
  const double w2 = kTwoPi * kTwoPi;
  if (name == "flat_torus") {
    const int n = params.n.value_or(2);
    if (n < 1) throw InputError("flat_torus: n must be positive");
    return make_frame(Vector::Ones(n), CoefficientSpec::zero(n), CoefficientSpec::zero(n));
  }
  if (name == "sphere_equator") {
    Vector r(2);
    r << 0.0, -w2;
    return make_frame(Vector::Ones(2), CoefficientSpec::zero(2), CoefficientSpec::constant(r.asDiagonal()));
  }
  if (name == "lorentz_product") {
    Vector sig(3);
    sig << 1.0, 1.0, -1.0;
    Vector r(3);
    r << 0.0, -w2, 0.0;
    return make_frame(sig, CoefficientSpec::zero(3), CoefficientSpec::constant(r.asDiagonal()));
  }
  if (name == "constant_curvature") {
    Vector sig = params.signature.value_or(Vector::Ones(2));
    const int n = static_cast<int>(sig.size());
    Matrix rbar;
    if (params.rbar) {
      rbar = *params.rbar;
    } else {
      if (n != 2) throw InputError("constant_curvature: give Rbar explicitly when n != 2");
      Vector d(2);
      d << 0.0, params.curvature.value_or(-w2);
      rbar = d.asDiagonal();
    }
    return make_frame(std::move(sig), CoefficientSpec::zero(n), CoefficientSpec::constant(std::move(rbar)));
  }
  throw InputError("unknown example frame '" + name + "'");
}

std::vector<CatalogEntry> example_catalog() {
  return {
      {"flat_torus", "flat n-torus, G = I_n, Gamma = 0, Rbar = 0 (n defaults to 2)",
       "sf 0, i_maslov 0, i_conc 0, n_per n, n0 0, dim_per_cap_0 0"},
      {"sphere_equator", "equator of the unit sphere, n = 2, Rbar = diag(0, -4 pi^2)",
       "sf -1, sf_dirichlet -1, i_maslov 2, i_conc 0, n_per 3, n0 1, dim_per_cap_0 1"},
      {"lorentz_product", "spacelike equator in S^1 x S^2 with G = diag(1, 1, -1), Rbar = diag(0, -4 pi^2, 0)",
       "sf -1, sf_dirichlet -1, i_maslov 3, i_conc 0, n_minus_g 1, n_per 4, n0 1, dim_per_cap_0 1; "
       "residuals (2, 2)"},
      {"constant_curvature", "G given (default I_2), Gamma = 0, Rbar constant (default diag(0, c))",
       "residuals 0 away from degenerate crossings"},
  };
}

// ---------------------------------------------------------------------------
// Galerkin space and assembly

GalerkinSpace::GalerkinSpace(int n, int modes, std::optional<Matrix> twist)
    : n_(n), modes_(modes), twist_(std::move(twist)) {
  if (n < 1 || modes < 0) throw InputError("Galerkin space: need n >= 1 and modes >= 0");
  if (twist_ && (twist_->rows() != n || twist_->cols() != n)) {
    throw InputError("Galerkin space: twist has the wrong size");
  }
  const QuadratureRule rule = composite_rule(panels_for(2 * modes_));
  const int dim = this->dim();
  Matrix acc = Matrix::Zero(dim, dim);
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const Matrix d = derivatives(rule.nodes[q]);
    acc.noalias() += rule.weights[q] * d.transpose() * d;
  }
  const Matrix e0 = eval_at_zero();
  acc.noalias() += e0.transpose() * e0;
  gram_ = symmetrize(acc);
}

Matrix GalerkinSpace::values(double r) const {
  Vector v, dv;
  scalar_basis(modes_, r, v, dv);
  Vector v0, dv0;
  scalar_basis(modes_, 0.0, v0, dv0);
  Matrix out = Matrix::Zero(n_, dim());
  for (int j = 0; j < scalar_count(); ++j) {
    out.block(0, j * n_, n_, n_).diagonal().setConstant(v(j));
    if (twist_) {
      out.block(0, j * n_, n_, n_) += r * v0(j) * (*twist_ - Matrix::Identity(n_, n_));
    }
  }
  return out;
}

Matrix GalerkinSpace::derivatives(double r) const {
  Vector v, dv;
  scalar_basis(modes_, r, v, dv);
  Vector v0, dv0;
  scalar_basis(modes_, 0.0, v0, dv0);
  Matrix out = Matrix::Zero(n_, dim());
  for (int j = 0; j < scalar_count(); ++j) {
    out.block(0, j * n_, n_, n_).diagonal().setConstant(dv(j));
    if (twist_) out.block(0, j * n_, n_, n_) += v0(j) * (*twist_ - Matrix::Identity(n_, n_));
  }
  return out;
}

Matrix GalerkinSpace::eval_at_zero() const { return values(0.0); }

Subspace GalerkinSpace::dirichlet(const Tolerance& tol) const {
  return Subspace::from_orthonormal(kernel_basis(eval_at_zero(), tol));
}

SymmetricForm assemble_B(double t, const GalerkinSpace& space, const GeodesicFrameData& frame) {
  if (!(t >= 0.0 && t <= 1.0)) throw InputError("assemble_B: t must lie in [0, 1]");
  require_fiber(space, frame);
  const int n = frame.n();
  const int dim = space.dim();
  const Matrix g = frame.metric();
  const bool with_gamma = t > 0.0 && !frame.gamma.is_zero();
  const bool with_potential = t > 0.0 && (with_gamma || !frame.rbar.is_zero());

  const int data_frequency = std::max(frame.gamma.max_frequency(), frame.rbar.max_frequency());
  const QuadratureRule rule = composite_rule(panels_for(2 * space.modes() + 2 * data_frequency + 1));
  const auto nodes = static_cast<Eigen::Index>(rule.nodes.size());

  // Stacked per-node blocks: rows [q*n, (q+1)*n) belong to node q.
  Matrix vals(n * nodes, dim);
  Matrix ders(n * nodes, dim);
  Matrix weighted_ders(n * nodes, dim);
  Matrix cross(with_gamma ? n * nodes : 0, dim);
  Matrix potential(with_potential ? n * nodes : 0, dim);
  for (Eigen::Index q = 0; q < nodes; ++q) {
    const double r = rule.nodes[static_cast<std::size_t>(q)];
    const double w = rule.weights[static_cast<std::size_t>(q)];
    const Matrix v = space.values(r);
    const Matrix d = space.derivatives(r);
    vals.middleRows(q * n, n) = v;
    ders.middleRows(q * n, n) = d;
    weighted_ders.middleRows(q * n, n) = w * g * d;
    if (with_gamma || with_potential) {
      const double s = t * r;
      const Matrix gamma = frame.gamma.at(s);
      if (with_gamma) cross.middleRows(q * n, n) = (w * t) * (gamma.transpose() * g) * d;
      if (with_potential) {
        const Matrix c = gamma.transpose() * g * gamma + g * frame.rbar.at(s);
        potential.middleRows(q * n, n) = (w * t * t) * symmetrize(c) * v;
      }
    }
  }

  Matrix b = ders.transpose() * weighted_ders;
  if (with_gamma) {
    const Matrix z = vals.transpose() * cross;
    b += z + z.transpose();
  }
  if (with_potential) b.noalias() += vals.transpose() * potential;
  return SymmetricForm(symmetrize(b), space.gram());
}

SymmetryOperator symmetry_J(const GalerkinSpace& space, const GeodesicFrameData& frame) {
  require_fiber(space, frame);
  if (space.twist()) throw InputError("symmetry_J: defined on the periodic space only");
  Matrix j = Matrix::Zero(space.dim(), space.dim());
  const Matrix g = frame.metric();
  for (int s = 0; s < space.scalar_count(); ++s) {
    j.block(s * frame.n(), s * frame.n(), frame.n(), frame.n()) = g;
  }
  return SymmetryOperator(std::move(j));
}

OperatorPath geodesic_path(const GalerkinSpace& space, const GeodesicFrameData& frame) {
  require_fiber(space, frame);
  return OperatorPath(0.0, 1.0, space.dim(),
                      [space, frame](double t) { return assemble_B(t, space, frame); });
}

GalerkinFlow sf_geodesic(const GeodesicFrameData& frame, const GalerkinSpace& space,
                         const GalerkinOptions& options) {
  frame.validate();
  require_fiber(space, frame);
  GalerkinFlow out;
  out.modes = space.modes();
  out.flow = sf_endpoints(geodesic_path(space, frame), options.tol);
  out.sf_at_modes = out.flow.sf;
  out.sf_at_double = out.sf_at_modes;
  if (options.check_refinement) {
    out.sf_at_double = periodic_flow(endpoint_forms(space.refined(), frame), options.tol).sf;
    require_stable(out.sf_at_modes, out.sf_at_double, space.modes(), "sf_geodesic");
  }
  out.sf = out.sf_at_modes;
  return out;
}

GalerkinFlow sf_dirichlet(const GeodesicFrameData& frame, const GalerkinSpace& space,
                          const GalerkinOptions& options) {
  frame.validate();
  require_fiber(space, frame);
  GalerkinFlow out;
  out.modes = space.modes();
  out.flow = sf_restricted(geodesic_path(space, frame), space.dirichlet(options.tol), options.tol);
  out.sf_at_modes = out.flow.sf;
  out.sf_at_double = out.sf_at_modes;
  if (options.check_refinement) {
    const GalerkinSpace fine = space.refined();
    out.sf_at_double = dirichlet_flow(endpoint_forms(fine, frame), fine, options.tol).sf;
    require_stable(out.sf_at_modes, out.sf_at_double, space.modes(), "sf_dirichlet");
  }
  out.sf = out.sf_at_modes;
  return out;
}

// ---------------------------------------------------------------------------
// Jacobi fields

Matrix symplectic_form(int n) {
  Matrix omega = Matrix::Zero(2 * n, 2 * n);
  omega.topRightCorner(n, n).setIdentity();
  omega.bottomLeftCorner(n, n) = -Matrix::Identity(n, n);
  return omega;
}

JacobiFlow jacobi_fundamental(const GeodesicFrameData& frame, std::vector<double> grid,
                              const JacobiOptions& options) {
  frame.validate();
  if (grid.empty() || grid.front() != 0.0) grid.insert(grid.begin(), 0.0);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw InputError("jacobi_fundamental: grid must increase strictly");
  }
  if (grid.back() < 1.0) throw InputError("jacobi_fundamental: grid must cover [0, 1]");

  const int n = frame.n();
  const MatrixX id = MatrixX::Identity(2 * n, 2 * n);
  JacobiFlow out;
  out.times = grid;
  const std::vector<MatrixX> flow = propagate_ext(frame, id, grid, options.abs_tol, options.rel_tol);

  const MatrixX omega = symplectic_form(n).cast<Real>();
  for (const MatrixX& phi : flow) {
    const MatrixX defect = phi.transpose() * omega * phi - omega;
    out.symplectic_residual = std::max(out.symplectic_residual, norm2(defect.cast<double>()));
    out.phi.push_back(phi.cast<double>());
  }
  if (out.symplectic_residual > options.symplectic_limit) {
    throw NumericalFailure("jacobi_fundamental: symplectic residual " + fmt(out.symplectic_residual) +
                           " exceeds " + fmt(options.symplectic_limit) + " (tighten abs/rel tolerance)");
  }
  if (options.richardson_check) {
    const std::vector<double> ends{0.0, grid.back()};
    const Matrix fine =
        propagate_ext(frame, id, ends, options.abs_tol / 32.0, options.rel_tol / 32.0).back().cast<double>();
    out.richardson_residual = norm2(fine - out.phi.back()) / flow_scale(fine);
    if (out.richardson_residual > options.richardson_limit) {
      throw NumericalFailure("jacobi_fundamental: step-halving check differs by " +
                             fmt(out.richardson_residual));
    }
  }
  return out;
}

std::vector<ConjugateInstant> conjugate_instants(const GeodesicFrameData& frame,
                                                 const JacobiOptions& options) {
  const int n = frame.n();
  const int k = std::max(8, options.scan_points);
  std::vector<double> grid;
  for (int i = 0; i <= k; ++i) grid.push_back(static_cast<double>(i) / k);
  JacobiOptions scan_options = options;
  scan_options.richardson_check = false;
  const JacobiFlow flow = jacobi_fundamental(frame, grid, scan_options);

  // V(t) / t stays invertible near t = 0, so the only zeros are conjugate instants.
  auto normalized = [n](const Matrix& phi, double t) {
    const Vector s = singular_values(upper_right(phi, n));
    return s(s.size() - 1) / t;
  };
  std::vector<double> f(grid.size());
  f[0] = 1.0 / flow_scale(frame.metric());
  for (std::size_t i = 1; i < grid.size(); ++i) f[i] = normalized(flow.phi[i], grid[i]);

  std::vector<ConjugateInstant> out;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const bool left_ok = f[i] <= f[i - 1];
    const bool right_ok = i + 1 == grid.size() || f[i] <= f[i + 1];
    if (!left_ok || !right_ok) continue;

    // Golden-section search of the minimum on [t_{i-1}, t_{i+1}].
    const double origin = grid[i - 1];
    const Matrix& origin_state = flow.phi[i - 1];
    auto state_at = [&](double t) {
      return propagate(frame, origin_state, {origin, t}, options.abs_tol, options.rel_tol).back();
    };
    double lo = std::max(grid[i - 1], 0.5 * grid[1]);
    double hi = i + 1 == grid.size() ? grid[i] : grid[i + 1];
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - ratio * (hi - lo);
    double x2 = lo + ratio * (hi - lo);
    double f1 = normalized(state_at(x1), x1);
    double f2 = normalized(state_at(x2), x2);
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
      if (f1 <= f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - ratio * (hi - lo);
        f1 = normalized(state_at(x1), x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + ratio * (hi - lo);
        f2 = normalized(state_at(x2), x2);
      }
    }
    // The end point itself is a candidate when the minimum runs into it.
    double t_star = f1 <= f2 ? x1 : x2;
    Matrix phi_star = state_at(t_star);
    if (i + 1 == grid.size()) {
      const Matrix& phi_end = flow.phi.back();
      if (normalized(phi_end, 1.0) <= normalized(phi_star, t_star)) {
        t_star = 1.0;
        phi_star = phi_end;
      }
    }

    const double scale = flow_scale(phi_star);
    Eigen::JacobiSVD<Matrix> svd(upper_right(phi_star, n), Eigen::ComputeFullV);
    const Vector& s = svd.singularValues();
    if (s(s.size() - 1) > options.flow_tol.band(scale)) continue;
    if (!out.empty() && std::abs(out.back().t - t_star) < 1e-8) continue;

    Eigen::Index mult = 0;
    const double mult_cut = 10.0 * std::sqrt(options.flow_tol.rel_zero) * scale;
    while (mult < s.size() && s(s.size() - 1 - mult) <= mult_cut) ++mult;
    if (mult == 0) mult = 1;
    const Matrix kernel = svd.matrixV().rightCols(mult);
    const Matrix p = phi_star.bottomRightCorner(n, n);
    const Matrix q = symmetrize(kernel.transpose() * p.transpose() * frame.metric() * p * kernel);
    const Vector ev = eigvals_sym(q);
    const double q_scale = std::max(1.0, p.squaredNorm());
    int signature = 0;
    for (double v : ev) {
      if (std::abs(v) <= 1e-8 * q_scale) {
        throw NumericalFailure("maslov: degenerate crossing form at t=" + fmt(t_star) +
                               "; perturb Rbar (shift_curvature) and re-run");
      }
      signature += v > 0.0 ? 1 : -1;
    }
    out.push_back({t_star, static_cast<int>(mult), signature});
  }
  return out;
}

int maslov_index(const GeodesicFrameData& frame, const JacobiOptions& options) {
  int total = frame.n_minus_g();
  for (const auto& c : conjugate_instants(frame, options)) total += c.signature;
  return total;
}

int concavity_index(const GeodesicFrameData& frame, const JacobiOptions& options) {
  const int n = frame.n();
  const Matrix phi = jacobi_fundamental(frame, {0.0, 1.0}, options).phi.back();
  const double scale = flow_scale(phi);
  Matrix endpoint_gap(n, 2 * n);
  endpoint_gap << phi.topLeftCorner(n, n) - Matrix::Identity(n, n), phi.topRightCorner(n, n);
  const Matrix basis = scaled_kernel(endpoint_gap, scale, options.flow_tol);
  if (basis.cols() == 0) return 0;

  Matrix momentum_gap(n, 2 * n);
  momentum_gap << phi.bottomLeftCorner(n, n), phi.bottomRightCorner(n, n) - Matrix::Identity(n, n);
  // g(u_a(1) - u_a(0), v_b(0)) with u = G p reduces to (p_a(1) - p_a(0)) . v_b(0).
  const Matrix m = (momentum_gap * basis).transpose() * basis.topRows(n);
  const double m_scale = std::max(1.0, norm2(m));
  if (norm2(m - m.transpose()) > 1e-8 * m_scale) {
    throw NumericalFailure("concavity_index: boundary form is not symmetric (residual " +
                           fmt(norm2(m - m.transpose())) + ")");
  }
  const Vector ev = eigvals_sym(symmetrize(m));
  int negative = 0;
  for (double v : ev) negative += v < -options.flow_tol.band(m_scale) ? 1 : 0;
  return negative;
}

JacobiNullities jacobi_nullities(const GeodesicFrameData& frame, const JacobiOptions& options) {
  const int n = frame.n();
  const Matrix phi = jacobi_fundamental(frame, {0.0, 1.0}, options).phi.back();
  const double scale = flow_scale(phi);
  JacobiNullities out;
  out.n_per = static_cast<int>(
      scaled_kernel(phi - Matrix::Identity(2 * n, 2 * n), scale, options.flow_tol).cols());
  out.n0 = static_cast<int>(scaled_kernel(upper_right(phi, n), scale, options.flow_tol).cols());
  Matrix fixed(2 * n, n);
  fixed << phi.topRightCorner(n, n), phi.bottomRightCorner(n, n) - Matrix::Identity(n, n);
  out.dim_per_cap_0 = static_cast<int>(scaled_kernel(fixed, scale, options.flow_tol).cols());
  return out;
}

// ---------------------------------------------------------------------------
// Closed-geodesic formula

GeodesicReport verify_periodic_formula(const GeodesicFrameData& frame, int modes,
                                       const GalerkinOptions& galerkin, const JacobiOptions& jacobi) {
  frame.validate();
  GeodesicReport out;
  const GalerkinSpace space(frame.n(), modes);
  const GalerkinEndpoints coarse = endpoint_forms(space, frame);

  const FlowReport periodic = periodic_flow(coarse, galerkin.tol);
  const FlowReport dirichlet = dirichlet_flow(coarse, space, galerkin.tol);
  out.modes = modes;
  out.sf = periodic.sf;
  out.sf_dirichlet = dirichlet.sf;
  out.sf_at_modes = periodic.sf;
  out.sf_at_double = periodic.sf;
  out.sf_dirichlet_at_double = dirichlet.sf;
  out.galerkin_kernel = periodic.nullity_end;
  if (galerkin.check_refinement) {
    const GalerkinSpace fine = space.refined();
    const GalerkinEndpoints refined = endpoint_forms(fine, frame);
    out.sf_at_double = periodic_flow(refined, galerkin.tol).sf;
    out.sf_dirichlet_at_double = dirichlet_flow(refined, fine, galerkin.tol).sf;
    require_stable(out.sf_at_modes, out.sf_at_double, modes, "sf_geodesic");
    require_stable(out.sf_dirichlet, out.sf_dirichlet_at_double, modes, "sf_dirichlet");
  }

  if (galerkin.samples >= 2) {
    Matrix previous;
    for (int i = 0; i < galerkin.samples; ++i) {
      const double t = static_cast<double>(i) / (galerkin.samples - 1);
      const Matrix b = i == 0 ? coarse.b0.matrix()
                       : i + 1 == galerkin.samples ? coarse.b1.matrix()
                                                   : assemble_B(t, space, frame).matrix();
      const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
      out.max_asymmetry = std::max(out.max_asymmetry, (b - b.transpose()).cwiseAbs().maxCoeff() / scale);
      if (i > 0) {
        out.lipschitz_bound = std::max(out.lipschitz_bound, (b - previous).norm() * (galerkin.samples - 1));
      }
      previous = b;
    }
  }

  const JacobiFlow flow = jacobi_fundamental(frame, {0.0, 1.0}, jacobi);
  out.symplectic_residual = flow.symplectic_residual;
  out.richardson_residual = flow.richardson_residual;
  out.conjugate_instants = conjugate_instants(frame, jacobi);
  out.n_minus_g = frame.n_minus_g();
  out.i_maslov = out.n_minus_g;
  for (const auto& c : out.conjugate_instants) out.i_maslov += c.signature;
  out.i_conc = concavity_index(frame, jacobi);
  const JacobiNullities nullities = jacobi_nullities(frame, jacobi);
  out.n_per = nullities.n_per;
  out.n0 = nullities.n0;
  out.dim_per_cap_0 = nullities.dim_per_cap_0;

  out.residual_periodic = out.sf - (out.dim_per_cap_0 - out.i_maslov - out.i_conc - out.n_minus_g);
  out.residual_dirichlet = out.sf_dirichlet - (out.n0 - out.n_minus_g - out.i_maslov);

  out.warnings = periodic.warnings;
  if (out.galerkin_kernel != out.n_per) {
    out.warnings.push_back("nullity of B_1 (" + std::to_string(out.galerkin_kernel) +
                           ") differs from n_per (" + std::to_string(out.n_per) + ")");
  }
  return out;
}

TwistedFlow sf_twisted(const GeodesicFrameData& frame, int modes, const GalerkinOptions& options) {
  frame.validate();
  const int n = frame.n();
  const Matrix s = frame.holonomy.value_or(Matrix::Identity(n, n));
  const GalerkinSpace space(n, modes, s);
  TwistedFlow out;
  out.sf_s = periodic_flow(endpoint_forms(space, frame), options.tol).sf;
  if (options.check_refinement) {
    const int fine = periodic_flow(endpoint_forms(space.refined(), frame), options.tol).sf;
    require_stable(out.sf_s, fine, modes, "sf_twisted");
  }
  const Matrix range = orthonormal_basis(s - Matrix::Identity(n, n), options.tol);
  if (range.cols() > 0) {
    out.n_s = morse_index(SymmetricForm(symmetrize(range.transpose() * frame.metric() * range)), options.tol);
  }
  out.sf = out.sf_s - out.n_s;
  return out;
}

}  // namespace sfkit
