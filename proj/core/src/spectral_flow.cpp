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

#include "sfkit/spectral_flow.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "sfkit/errors.hpp"

namespace sfkit {
namespace {

constexpr double kDomainSlack = 1e-12;

std::string fmt_time(double t) {
  std::ostringstream os;
  os << std::setprecision(10) << t;
  return os.str();
}

FlowReport flow_between(const SymmetricForm& start, const SymmetricForm& end, double ta, double tb,
                        FlowMethod method, const Tolerance& tol) {
  const Inertia ia = index_counts(start, tol);
  const Inertia ib = index_counts(end, tol);
  FlowReport out;
  out.method = method;
  out.sf = ia.negative - ib.negative;
  out.n_minus_start = ia.negative;
  out.n_minus_end = ib.negative;
  out.nullity_start = ia.zero;
  out.nullity_end = ib.zero;
  out.min_endpoint_gap = std::min(ia.gap, ib.gap);
  if (ia.zero > 0) {
    out.warnings.push_back("degenerate endpoint at t=" + fmt_time(ta) + ": nullity " +
                           std::to_string(ia.zero));
  }
  if (ib.zero > 0) {
    out.warnings.push_back("degenerate endpoint at t=" + fmt_time(tb) + ": nullity " +
                           std::to_string(ib.zero));
  }
  return out;
}

// Eigenvalues with the in-band ones snapped to zero.
Vector snapped_spectrum(const SymmetricForm& form, const Tolerance& tol, double* band_out) {
  Vector ev = form.eigenvalues(tol);
  const Inertia in = inertia(ev, tol);
  for (double& v : ev) {
    if (std::abs(v) <= in.band) v = 0.0;
  }
  *band_out = in.band;
  return ev;
}

int count_abs_at_most(const Vector& ev, double a) {
  int n = 0;
  for (double v : ev) n += std::abs(v) <= a ? 1 : 0;
  return n;
}

int count_in_zero_to(const Vector& ev, double a) {
  int n = 0;
  for (double v : ev) n += (v >= 0.0 && v <= a) ? 1 : 0;
  return n;
}

void require_invertible(const Matrix& s, double t) {
  require_square(s, "cogredient transform");
  require_finite(s, "cogredient transform");
  const Vector sv = singular_values(s);
  if (sv.size() > 0 && !(sv(sv.size() - 1) > 1e-12 * sv(0))) {
    throw InputError("cogredient transform: S is singular at t=" + fmt_time(t));
  }
}

}  // namespace

std::string to_string(FlowMethod method) {
  switch (method) {
    case FlowMethod::kEndpoints: return "endpoints";
    case FlowMethod::kPartition: return "partition";
    case FlowMethod::kRestricted: return "restricted";
    case FlowMethod::kVarying: return "varying";
  }
  return "unknown";
}

OperatorPath::OperatorPath(double a, double b, int dim, Evaluator evaluator)
    : a_(a), b_(b), dim_(dim), evaluator_(std::move(evaluator)) {
  if (!(b > a) || !std::isfinite(a) || !std::isfinite(b)) {
    throw InputError("operator path: domain must satisfy a < b");
  }
  if (dim < 0 || !evaluator_) throw InputError("operator path: missing evaluator");
}

OperatorPath OperatorPath::from_samples(std::vector<double> times, std::vector<Matrix> forms,
                                       std::optional<Matrix> gram) {
  if (times.size() < 2 || times.size() != forms.size()) {
    throw InputError("operator path: need at least two samples with matching times");
  }
  const int n = static_cast<int>(forms.front().rows());
  for (std::size_t i = 0; i < forms.size(); ++i) {
    if (i > 0 && !(times[i] > times[i - 1])) {
      throw InputError("operator path: sample times must increase strictly");
    }
    if (forms[i].rows() != n || forms[i].cols() != n) {
      throw InputError("operator path: samples differ in dimension");
    }
    SymmetricForm check(forms[i], gram);
    forms[i] = check.matrix();
  }
  const double a = times.front();
  const double b = times.back();
  auto evaluator = [times, forms, gram](double t) {
    const auto hi = std::upper_bound(times.begin(), times.end(), t);
    std::size_t j = static_cast<std::size_t>(hi - times.begin());
    j = std::clamp<std::size_t>(j, 1, times.size() - 1);
    const double w = std::clamp((t - times[j - 1]) / (times[j] - times[j - 1]), 0.0, 1.0);
    return SymmetricForm((1.0 - w) * forms[j - 1] + w * forms[j], gram);
  };
  OperatorPath path(a, b, n, std::move(evaluator));
  path.knots_ = times;
  return path;
}

OperatorPath OperatorPath::linear(Matrix base, Matrix slope, double a, double b,
                                  std::optional<Matrix> gram) {
  require_symmetric(base, "linear path base");
  require_symmetric(slope, "linear path slope");
  if (base.rows() != slope.rows()) throw InputError("linear path: base and slope differ in size");
  const int n = static_cast<int>(base.rows());
  return OperatorPath(a, b, n, [base = std::move(base), slope = std::move(slope), gram](double t) {
    return SymmetricForm(base + t * slope, gram);
  });
}

SymmetricForm OperatorPath::at(double t) const {
  if (t < a_ - kDomainSlack || t > b_ + kDomainSlack) {
    throw InputError("operator path: t=" + fmt_time(t) + " outside the domain");
  }
  SymmetricForm form = evaluator_(std::clamp(t, a_, b_));
  if (form.dim() != dim_) throw InputError("operator path: evaluator returned the wrong size");
  return form;
}

OperatorPath OperatorPath::slice(double a, double b) const {
  if (a < a_ - kDomainSlack || b > b_ + kDomainSlack) {
    throw InputError("operator path: slice outside the domain");
  }
  OperatorPath out(a, b, dim_, evaluator_);
  for (double k : knots_) {
    if (k >= a && k <= b) out.knots_.push_back(k);
  }
  return out;
}

OperatorPath OperatorPath::restricted(const Subspace& v) const {
  if (v.ambient_dim() != dim_) throw InputError("restricted path: subspace dimension mismatch");
  OperatorPath out(a_, b_, v.dim(), [inner = evaluator_, v](double t) { return restrict(inner(t), v); });
  out.knots_ = knots_;
  return out;
}

FlowReport sf_endpoints(const OperatorPath& path, const Tolerance& tol) {
  return flow_between(path.at(path.start()), path.at(path.end()), path.start(), path.end(),
                      FlowMethod::kEndpoints, tol);
}

FlowReport sf_partition(const OperatorPath& path, const PartitionOptions& options,
                        const Tolerance& tol) {
  if (options.check_points < 2) throw InputError("sf_partition: need at least two check points");
  FlowReport out = sf_endpoints(path, tol);
  out.method = FlowMethod::kPartition;
  out.sf = 0;

  std::function<void(double, double, int)> build = [&](double ta, double tb, int depth) {
    const int k = options.check_points;
    std::vector<Vector> spectra;
    spectra.reserve(static_cast<std::size_t>(k));
    double band = 0.0;
    for (int j = 0; j < k; ++j) {
      const double t = j + 1 == k ? tb : ta + (tb - ta) * static_cast<double>(j) / (k - 1);
      double b = 0.0;
      spectra.push_back(snapped_spectrum(path.at(t), tol, &b));
      band = std::max(band, b);
    }

    // Largest eigenvalue displacement between neighbouring check points.
    double drift = 0.0;
    std::vector<double> magnitudes;
    for (int j = 0; j < k; ++j) {
      const auto& ev = spectra[static_cast<std::size_t>(j)];
      for (double v : ev) magnitudes.push_back(std::abs(v));
      if (j > 0) {
        drift = std::max(drift, (ev - spectra[static_cast<std::size_t>(j - 1)]).cwiseAbs().maxCoeff());
      }
    }
    std::sort(magnitudes.begin(), magnitudes.end());
    const double top = magnitudes.empty() ? 0.0 : magnitudes.back();

    std::vector<double> candidates;
    for (std::size_t i = 1; i < magnitudes.size(); ++i) {
      if (magnitudes[i] > magnitudes[i - 1]) candidates.push_back(0.5 * (magnitudes[i] + magnitudes[i - 1]));
    }
    if (!magnitudes.empty() && magnitudes.front() > 0.0) {
      candidates.insert(candidates.begin(), 0.5 * magnitudes.front());
    }
    if (depth >= std::min(options.global_window_depth, options.max_depth)) {
      candidates.push_back(top > 0.0 ? 1.5 * top : 1.0);
    }

    double best_a = -1.0;
    double best_margin = -1.0;
    for (double a : candidates) {
      if (a <= 2.0 * band) continue;
      const int count = count_abs_at_most(spectra.front(), a);
      bool constant = true;
      double margin = std::numeric_limits<double>::infinity();
      for (const auto& ev : spectra) {
        if (count_abs_at_most(ev, a) != count) {
          constant = false;
          break;
        }
        for (double v : ev) margin = std::min(margin, std::abs(std::abs(v) - a));
      }
      if (!constant || !(margin > drift + band)) continue;
      // smallest admissible window around zero
      best_margin = margin;
      best_a = a;
      break;
    }

    if (best_a < 0.0) {
      if (depth >= options.max_depth) {
        throw NumericalFailure("sf_partition: no admissible threshold on [" + fmt_time(ta) + ", " +
                               fmt_time(tb) + "] after " + std::to_string(depth) + " bisections");
      }
      const double tm = 0.5 * (ta + tb);
      build(ta, tm, depth + 1);
      build(tm, tb, depth + 1);
      return;
    }
    PartitionCell cell;
    cell.t_begin = ta;
    cell.t_end = tb;
    cell.threshold = best_a;
    cell.margin = best_margin;
    cell.rank_begin = count_in_zero_to(spectra.front(), best_a);
    cell.rank_end = count_in_zero_to(spectra.back(), best_a);
    out.sf += cell.rank_end - cell.rank_begin;
    out.partition.push_back(cell);
  };

  build(path.start(), path.end(), 0);
  return out;
}

FlowReport sf_restricted(const OperatorPath& path, const Subspace& v, const Tolerance& tol) {
  FlowReport out = sf_endpoints(path.restricted(v), tol);
  out.method = FlowMethod::kRestricted;
  return out;
}

ReductionReport verify_reduction(const OperatorPath& path, const Subspace& v, const Tolerance& tol) {
  if (v.ambient_dim() != path.dim()) throw InputError("verify_reduction: dimension mismatch");
  const FlowReport full = sf_endpoints(path, tol);
  const FlowReport reduced = sf_restricted(path, v, tol);
  ReductionReport out;
  out.sf_full = full.sf;
  out.sf_restricted = reduced.sf;
  out.lhs = full.sf - reduced.sf;
  out.terms_start = restriction_terms(path.at(path.start()), v, tol);
  out.terms_end = restriction_terms(path.at(path.end()), v, tol);
  out.rhs = out.terms_start.total() - out.terms_end.total();
  out.warnings = full.warnings;
  return out;
}

VaryingFlow sf_varying(const OperatorPath& path, const SubspacePath& family,
                       const std::optional<Matrix>& initial, const LiftOptions& lift,
                       const Tolerance& tol) {
  family.validate();
  if (family.subspaces.front().ambient_dim() != path.dim()) {
    throw InputError("sf_varying: subspace family and path differ in dimension");
  }
  if (std::abs(family.times.front() - path.start()) > kDomainSlack ||
      std::abs(family.times.back() - path.end()) > kDomainSlack) {
    throw InputError("sf_varying: family domain does not match the path domain");
  }
  const Matrix start_map = initial ? *initial : Matrix::Identity(path.dim(), path.dim());
  VaryingFlow out{{}, lift_path(family, start_map, lift, tol), {}, {}};
  const Matrix& q = out.lift.reference.basis();

  auto reduce = [&](double t, const Matrix& phi) {
    const SymmetricForm form = path.at(t);
    const Matrix frame = phi * q;
    Matrix a = symmetrize(frame.transpose() * form.matrix() * frame);
    if (form.has_gram()) return SymmetricForm(std::move(a), symmetrize(frame.transpose() * form.gram() * frame));
    return SymmetricForm(std::move(a));
  };
  out.reduced_start = reduce(path.start(), out.lift.phi.front());
  out.reduced_end = reduce(path.end(), out.lift.phi.back());
  out.flow = flow_between(out.reduced_start, out.reduced_end, path.start(), path.end(),
                          FlowMethod::kVarying, tol);
  return out;
}

VaryingReductionReport verify_reduction_varying(const OperatorPath& path, const SubspacePath& family,
                                                const std::optional<Matrix>& initial,
                                                const LiftOptions& lift, const Tolerance& tol) {
  const VaryingFlow varying = sf_varying(path, family, initial, lift, tol);
  VaryingReductionReport out;
  out.sf_full = sf_endpoints(path, tol).sf;
  out.sf_varying = varying.flow.sf;
  out.lhs = out.sf_full - out.sf_varying;
  out.lift_refinements = varying.lift.refinements;

  const Matrix& q = varying.lift.reference.basis();
  auto boundary = [&](double t, const Matrix& phi, const SymmetricForm& reduced, int* rel_dim, int* terms) {
    const SymmetricForm form = path.at(t);
    const Matrix frame = phi * q;
    const Subspace reduced_minus = spectral_split(reduced, tol).minus;
    const Subspace embedded = Subspace::span(frame * reduced_minus.basis(), tol);
    *rel_dim = relative_dimension(spectral_split(form, tol).minus, embedded, tol);
    *terms = restriction_terms(form, Subspace::span(frame, tol), tol).total();
  };
  int terms_start = 0;
  int terms_end = 0;
  boundary(path.start(), varying.lift.phi.front(), varying.reduced_start, &out.relative_dim_start,
           &terms_start);
  boundary(path.end(), varying.lift.phi.back(), varying.reduced_end, &out.relative_dim_end, &terms_end);
  out.rhs = out.relative_dim_start - out.relative_dim_end;
  out.rhs_by_terms = terms_start - terms_end;
  return out;
}

OperatorPath cogredient_transform(const OperatorPath& path, std::function<Matrix(double)> s) {
  const int n = path.dim();
  return OperatorPath(path.start(), path.end(), n, [path, s = std::move(s), n](double t) {
    const Matrix st = s(t);
    if (st.rows() != n) throw InputError("cogredient transform: S has the wrong size");
    require_invertible(st, t);
    const SymmetricForm form = path.at(t);
    Matrix a = symmetrize(st.transpose() * form.matrix() * st);
    if (form.has_gram()) return SymmetricForm(std::move(a), symmetrize(st.transpose() * form.gram() * st));
    return SymmetricForm(std::move(a));
  });
}

OperatorPath cogredient_transform(const OperatorPath& path, std::vector<double> times,
                                  std::vector<Matrix> s) {
  if (times.size() < 2 || times.size() != s.size()) {
    throw InputError("cogredient transform: need matching times and matrices");
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i > 0 && !(times[i] > times[i - 1])) throw InputError("cogredient transform: times must increase");
    require_invertible(s[i], times[i]);
  }
  if (std::abs(times.front() - path.start()) > kDomainSlack ||
      std::abs(times.back() - path.end()) > kDomainSlack) {
    throw InputError("cogredient transform: grid does not cover the path domain");
  }
  return cogredient_transform(path, [times = std::move(times), s = std::move(s)](double t) -> Matrix {
    const auto hi = std::upper_bound(times.begin(), times.end(), t);
    std::size_t j = static_cast<std::size_t>(hi - times.begin());
    j = std::clamp<std::size_t>(j, 1, times.size() - 1);
    const double w = std::clamp((t - times[j - 1]) / (times[j] - times[j - 1]), 0.0, 1.0);
    return (1.0 - w) * s[j - 1] + w * s[j];
  });
}

void write_eigenvalue_trace(std::ostream& out, const OperatorPath& path, int samples,
                            const Tolerance& tol) {
  if (samples < 2) throw InputError("eigenvalue trace: need at least two samples");
  out << "t";
  for (int k = 1; k <= path.dim(); ++k) out << ",lambda_" << k;
  out << '\n' << std::setprecision(12);
  for (int i = 0; i < samples; ++i) {
    const double t = i + 1 == samples
                         ? path.end()
                         : path.start() + (path.end() - path.start()) * static_cast<double>(i) / (samples - 1);
    const Vector ev = path.at(t).eigenvalues(tol);
    out << t;
    for (double v : ev) out << ',' << v;
    out << '\n';
  }
}

}  // namespace sfkit
