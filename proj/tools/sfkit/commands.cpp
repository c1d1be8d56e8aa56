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

#include "sfkit/commands.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

#include "sfkit/errors.hpp"
#include "sfkit/geodesics.hpp"
#include "sfkit/grassmann.hpp"
#include "sfkit/instances.hpp"
#include "sfkit/scenario.hpp"
#include "sfkit/spectral_flow.hpp"

namespace sfkit::cli {
namespace {

using Clock = std::chrono::steady_clock;

Json to_json(const FlowReport& r) {
  Json j;
  j["sf"] = r.sf;
  j["method"] = to_string(r.method);
  j["nullity_start"] = r.nullity_start;
  j["nullity_end"] = r.nullity_end;
  j["n_minus_start"] = r.n_minus_start;
  j["n_minus_end"] = r.n_minus_end;
  j["min_endpoint_gap"] = number(r.min_endpoint_gap);
  Json cells = Json::array();
  for (const PartitionCell& c : r.partition) {
    cells.push_back({{"t_begin", c.t_begin},
                     {"t_end", c.t_end},
                     {"threshold", c.threshold},
                     {"margin", number(c.margin)},
                     {"rank_begin", c.rank_begin},
                     {"rank_end", c.rank_end}});
  }
  j["partition"] = cells;
  j["warnings"] = r.warnings;
  return j;
}

Json to_json(const RestrictionTerms& t) {
  return {{"n_minus_complement", t.n_minus_complement},
          {"dim_v_cap_complement", t.dim_v_cap_complement},
          {"dim_v_cap_kernel", t.dim_v_cap_kernel},
          {"total", t.total()}};
}

Json to_json(const ReductionReport& r) {
  return {{"sf_full", r.sf_full},
          {"sf_restricted", r.sf_restricted},
          {"lhs", r.lhs},
          {"rhs", r.rhs},
          {"holds", r.holds()},
          {"terms_start", to_json(r.terms_start)},
          {"terms_end", to_json(r.terms_end)},
          {"warnings", r.warnings}};
}

Json to_json(const VaryingReductionReport& r) {
  return {{"sf", r.sf_varying},
          {"sf_full", r.sf_full},
          {"sf_varying", r.sf_varying},
          {"lhs", r.lhs},
          {"rhs", r.rhs},
          {"holds", r.holds()},
          {"relative_dim_start", r.relative_dim_start},
          {"relative_dim_end", r.relative_dim_end},
          {"rhs_by_terms", r.rhs_by_terms},
          {"lift_refinements", r.lift_refinements}};
}

Json to_json(const GeodesicReport& r) {
  Json instants = Json::array();
  for (const ConjugateInstant& c : r.conjugate_instants) {
    instants.push_back({{"t", c.t}, {"multiplicity", c.multiplicity}, {"signature", c.signature}});
  }
  return {{"sf", r.sf},
          {"sf_dirichlet", r.sf_dirichlet},
          {"i_maslov", r.i_maslov},
          {"i_conc", r.i_conc},
          {"n_per", r.n_per},
          {"n0", r.n0},
          {"dim_per_cap_0", r.dim_per_cap_0},
          {"n_minus_g", r.n_minus_g},
          {"residual_periodic", r.residual_periodic},
          {"residual_dirichlet", r.residual_dirichlet},
          {"holds", r.holds()},
          {"conjugate_instants", instants},
          {"modes", r.modes},
          {"sf_at_modes", r.sf_at_modes},
          {"sf_at_double", r.sf_at_double},
          {"sf_dirichlet_at_double", r.sf_dirichlet_at_double},
          {"galerkin_kernel", r.galerkin_kernel},
          {"symplectic_residual", number(r.symplectic_residual)},
          {"richardson_residual", number(r.richardson_residual)},
          {"max_asymmetry", number(r.max_asymmetry)},
          {"lipschitz_bound", number(r.lipschitz_bound)},
          {"warnings", r.warnings}};
}

// Common envelope: tool, version, kind, input echo and tolerance.
Json envelope(const std::string& kind, Json input, const Tolerance& tol, const std::string& tol_source) {
  Json j;
  j["tool"] = "sfkit";
  j["version"] = kVersion;
  j["kind"] = kind;
  j["input"] = std::move(input);
  j["tolerance"] = {{"rel_zero", tol.rel_zero}, {"abs_zero", tol.abs_zero}, {"source", tol_source}};
  return j;
}

Json random_echo(const RunOptions& o) {
  return {{"random", true}, {"dim", o.dim}, {"codim", o.codim}, {"seed", o.seed}, {"count", o.count},
          {"degenerate", o.degenerate}};
}

void merge(Json& into, const Json& from) {
  for (auto it = from.begin(); it != from.end(); ++it) into[it.key()] = it.value();
}

void add_timing(Json& report, const RunOptions& o, Clock::time_point start) {
  if (!o.timings) return;
  report["timings"] = {{"total_seconds", std::chrono::duration<double>(Clock::now() - start).count()}};
}

void write_trace(const std::string& file, const OperatorPath& path, int samples, const Tolerance& tol) {
  std::ofstream out(file);
  if (!out) throw InputError("cannot open trace file '" + file + "'");
  write_eigenvalue_trace(out, path, samples, tol);
}

// Scenario tolerance wins over env/CLI, which win over the default.
struct Resolved {
  Json scenario;
  Tolerance tol;
  std::string source;
};

Resolved resolve_input(const RunOptions& o, const std::string& kind) {
  Resolved r{Json::object(), o.tol, o.tol_source};
  if (o.input) {
    r.scenario = load_scenario(*o.input, kind);
    if (auto t = parse_tolerance(r.scenario, o.tol)) {
      r.tol = *t;
      r.source = "scenario";
    }
  }
  return r;
}

void require_source(const RunOptions& o, bool allow_example) {
  const int given = (o.input ? 1 : 0) + (o.random ? 1 : 0) + (o.example ? 1 : 0);
  if (given != 1) {
    throw InputError(allow_example ? "give exactly one of -i FILE, --example NAME or --random"
                                   : "give exactly one of -i FILE or --random");
  }
  if (o.example && !allow_example) throw InputError("--example is only available for the geodesic command");
  if (o.random) {
    if (o.dim < 1) throw InputError("--dim must be positive");
    if (o.codim < 0 || o.codim > o.dim) throw InputError("--codim must lie in [0, dim]");
    if (o.count < 1) throw InputError("--count must be positive");
  }
}

}  // namespace

std::optional<double> tolerance_from_env() {
  const char* raw = std::getenv("SFKIT_TOL");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  const std::string text(raw);
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw InputError("SFKIT_TOL: not a number: '" + text + "'");
  }
  if (used != text.size() || !(value > 0.0) || !std::isfinite(value)) {
    throw InputError("SFKIT_TOL: expected a positive number, got '" + text + "'");
  }
  return value;
}

RunResult guarded(const std::function<RunResult()>& command) {
  auto failure = [](int code, const std::string& message) {
    RunResult r;
    r.exit_code = code;
    r.report = {{"tool", "sfkit"}, {"version", kVersion}, {"error", message}, {"exit_code", code}};
    return r;
  };
  try {
    return command();
  } catch (const InputError& e) {
    return failure(kExitInputError, e.what());
  } catch (const Json::exception& e) {
    return failure(kExitInputError, e.what());
  } catch (const NumericalFailure& e) {
    return failure(kExitNumericalFailure, e.what());
  }
}

RunResult run_path(const RunOptions& o) {
  const auto start = Clock::now();
  require_source(o, false);
  if (o.method != "endpoints" && o.method != "partition") {
    throw InputError("--method must be 'endpoints' or 'partition'");
  }
  const Resolved in = resolve_input(o, "path");
  std::optional<OperatorPath> path;
  Json echo;
  if (o.random) {
    Rng rng(o.seed);
    path = random_path(rng, o.dim);
    echo = random_echo(o);
  } else {
    path = parse_path(in.scenario);
    echo = in.scenario;
  }
  const FlowReport flow = o.method == "partition" ? sf_partition(*path, {}, in.tol) : sf_endpoints(*path, in.tol);
  if (o.trace) write_trace(*o.trace, *path, 101, in.tol);
  RunResult r;
  r.report = envelope("path", echo, in.tol, in.source);
  merge(r.report, to_json(flow));
  add_timing(r.report, o, start);
  return r;
}

RunResult run_reduce(const RunOptions& o) {
  const auto start = Clock::now();
  require_source(o, false);
  const Resolved in = resolve_input(o, "reduce");
  RunResult r;
  if (o.random) {
    r.report = envelope("reduce", random_echo(o), in.tol, in.source);
    Rng rng(o.seed);
    Json trials = Json::array();
    int failures = 0;
    for (int k = 0; k < o.count; ++k) {
      const ReduceInstance inst = random_reduce_instance(rng, o.dim, o.codim, o.degenerate);
      const ReductionReport rep = verify_reduction(inst.path(), inst.v, in.tol);
      failures += rep.holds() ? 0 : 1;
      Json t = to_json(rep);
      t["trial"] = k;
      trials.push_back(std::move(t));
    }
    if (o.count == 1) {
      Json single = trials[0];
      single.erase("trial");
      merge(r.report, single);
    } else {
      r.report["trials"] = trials;
      r.report["failures"] = failures;
      r.report["holds"] = failures == 0;
    }
    r.exit_code = failures == 0 ? kExitOk : kExitIdentityViolated;
  } else {
    const OperatorPath path = parse_path(in.scenario);
    const Subspace v = parse_subspace(in.scenario, "subspace", path.dim(), in.tol);
    const ReductionReport rep = verify_reduction(path, v, in.tol);
    r.report = envelope("reduce", in.scenario, in.tol, in.source);
    merge(r.report, to_json(rep));
    r.exit_code = rep.holds() ? kExitOk : kExitIdentityViolated;
  }
  add_timing(r.report, o, start);
  return r;
}

RunResult run_vary(const RunOptions& o) {
  const auto start = Clock::now();
  require_source(o, false);
  const Resolved in = resolve_input(o, "vary");
  RunResult r;
  if (o.random) {
    r.report = envelope("vary", random_echo(o), in.tol, in.source);
    Rng rng(o.seed);
    Json trials = Json::array();
    int failures = 0;
    for (int k = 0; k < o.count; ++k) {
      const VaryInstance inst = random_vary_instance(rng, o.dim, o.codim);
      const VaryingReductionReport rep = verify_reduction_varying(inst.path(), inst.family(), std::nullopt, {}, in.tol);
      failures += rep.holds() ? 0 : 1;
      Json t = to_json(rep);
      t["trial"] = k;
      trials.push_back(std::move(t));
    }
    if (o.count == 1) {
      Json single = trials[0];
      single.erase("trial");
      merge(r.report, single);
    } else {
      r.report["trials"] = trials;
      r.report["failures"] = failures;
      r.report["holds"] = failures == 0;
    }
    r.exit_code = failures == 0 ? kExitOk : kExitIdentityViolated;
  } else {
    const OperatorPath path = parse_path(in.scenario);
    const SubspacePath family = parse_family(in.scenario, path.dim(), in.tol);
    std::optional<Matrix> initial;
    if (in.scenario.contains("initial")) initial = matrix_from_json(in.scenario["initial"], "initial");
    const VaryingReductionReport rep = verify_reduction_varying(path, family, initial, {}, in.tol);
    r.report = envelope("vary", in.scenario, in.tol, in.source);
    merge(r.report, to_json(rep));
    r.exit_code = rep.holds() ? kExitOk : kExitIdentityViolated;
  }
  add_timing(r.report, o, start);
  return r;
}

RunResult run_geodesic(const RunOptions& o) {
  const auto start = Clock::now();
  if ((o.input ? 1 : 0) + (o.example ? 1 : 0) != 1 || o.random) {
    throw InputError("give exactly one of -i FILE or --example NAME");
  }
  const Resolved in = resolve_input(o, "geodesic");
  std::optional<GeodesicFrameData> frame;
  std::optional<int> scenario_modes;
  Json echo;
  if (o.example) {
    ExampleParams params;
    params.n = o.fiber_dim;
    params.curvature = o.curvature;
    frame = example_frame(*o.example, params);
    echo = {{"example", *o.example}};
    if (o.fiber_dim) echo["n"] = *o.fiber_dim;
    if (o.curvature) echo["curvature"] = *o.curvature;
  } else {
    GeodesicScenario parsed = parse_geodesic(in.scenario);
    frame = std::move(parsed.frame);
    scenario_modes = parsed.modes;
    echo = in.scenario;
  }
  const int modes = o.modes.value_or(scenario_modes.value_or(16));
  if (modes < 1) throw InputError("--modes must be positive");

  GalerkinOptions galerkin;
  galerkin.tol = in.tol;
  const GeodesicReport rep = verify_periodic_formula(*frame, modes, galerkin);
  RunResult r;
  r.report = envelope("geodesic", echo, in.tol, in.source);
  merge(r.report, to_json(rep));
  if (frame->holonomy) {
    const TwistedFlow tw = sf_twisted(*frame, modes, galerkin);
    r.report["twisted"] = {{"sf_s", tw.sf_s}, {"n_s", tw.n_s}, {"sf", tw.sf}};
  }
  if (o.trace) write_trace(*o.trace, geodesic_path(GalerkinSpace(frame->n(), modes), *frame), 33, in.tol);
  r.exit_code = rep.holds() ? kExitOk : kExitIdentityViolated;
  add_timing(r.report, o, start);
  return r;
}

RunResult run_grassmann(const RunOptions& o) {
  const auto start = Clock::now();
  require_source(o, false);
  const Resolved in = resolve_input(o, "grassmann");
  std::optional<Subspace> v, w;
  Json echo;
  if (o.random) {
    Rng rng(o.seed);
    auto pair = random_subspace_pair(rng, o.dim);
    v = std::move(pair.first);
    w = std::move(pair.second);
    echo = random_echo(o);
  } else {
    const int n = integer_field(in.scenario, "n", "grassmann scenario");
    if (n < 1) throw InputError("n: must be positive");
    v = parse_subspace(in.scenario, "V", n, in.tol);
    w = parse_subspace(in.scenario, "W", n, in.tol);
    echo = in.scenario;
  }
  const int ind = fredholm_pair_index(*v, *w, in.tol);
  const int restricted = projection_restriction_index(*v, *w, in.tol);
  RunResult r;
  r.report = envelope("grassmann", echo, in.tol, in.source);
  merge(r.report, Json{{"ambient_dim", v->ambient_dim()},
                       {"dim_v", v->dim()},
                       {"dim_w", w->dim()},
                       {"dim_intersection", intersect(*v, *w, in.tol).dim()},
                       {"dim_sum", sum(*v, *w, in.tol).dim()},
                       {"fredholm_pair_index", ind},
                       {"projection_restriction_index", restricted},
                       {"relative_dimension", relative_dimension(*v, *w, in.tol)},
                       {"kato_gamma", kato_gamma(*v, *w, in.tol)},
                       {"gap_distance", gap_distance(*v, *w)},
                       {"holds", ind == restricted},
                       {"conventions", {{"kato_gamma_when_w_inside_v", 1.0}}}});
  r.exit_code = ind == restricted ? kExitOk : kExitIdentityViolated;
  add_timing(r.report, o, start);
  return r;
}

Json list_examples() {
  Json out = Json::array();
  for (const CatalogEntry& e : example_catalog()) {
    out.push_back({{"name", e.name}, {"description", e.description}, {"expected", e.expected}});
  }
  return {{"tool", "sfkit"}, {"version", kVersion}, {"examples", out}};
}

}  // namespace sfkit::cli
