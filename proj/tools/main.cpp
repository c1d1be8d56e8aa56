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

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "sfkit/commands.hpp"
#include "sfkit/errors.hpp"

namespace {

using sfkit::cli::Json;
using sfkit::cli::RunOptions;
using sfkit::cli::RunResult;

int emit(const RunResult& r, const std::optional<std::string>& output) {
  const std::string text = r.report.dump(2) + "\n";
  if (r.report.contains("error")) std::cerr << "sfkit: " << r.report["error"].get<std::string>() << "\n";
  if (output) {
    std::ofstream out(*output);
    if (!out) {
      std::cerr << "sfkit: cannot open output file '" << *output << "'\n";
      return sfkit::cli::kExitInputError;
    }
    out << text;
  } else {
    std::cout << text;
  }
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sfkit: spectral flow, Morse index and Maslov index checks in finite dimension"};
  app.set_version_flag("--version", std::string(sfkit::cli::kVersion));
  app.require_subcommand(0, 1);

  bool list_examples = false;
  app.add_flag("--list-examples", list_examples, "List the geodesic example catalog with expected invariants");

  RunOptions o;
  std::optional<std::string> output;
  std::optional<double> rel_tol;

  auto common = [&](CLI::App* sub) {
    sub->add_option("-i,--input", o.input, "Scenario JSON file");
    sub->add_option("-o,--output", output, "Write the JSON report here instead of stdout");
    sub->add_option("--rel-tol", rel_tol, "Relative zero threshold (overrides SFKIT_TOL)");
    sub->add_flag("--timings", o.timings, "Include wall-clock timings in the report");
  };
  auto random_opts = [&](CLI::App* sub) {
    sub->add_flag("--random", o.random, "Synthesize a seeded random instance");
    sub->add_option("--dim", o.dim, "Ambient dimension for --random")->capture_default_str();
    sub->add_option("--codim", o.codim, "Codimension of the subspace for --random")->capture_default_str();
    sub->add_option("--seed", o.seed, "Seed for --random")->capture_default_str();
  };

  CLI::App* path = app.add_subcommand("path", "Spectral flow of a path of symmetric forms");
  common(path);
  random_opts(path);
  path->add_option("--method", o.method, "endpoints or partition")->capture_default_str();
  path->add_option("--trace", o.trace, "Write the eigenvalue trace as CSV");

  CLI::App* reduce = app.add_subcommand("reduce", "Check the restriction identity for a fixed subspace");
  common(reduce);
  random_opts(reduce);
  reduce->add_option("--count", o.count, "Number of random trials")->capture_default_str();
  reduce->add_flag("--degenerate", o.degenerate, "Random endpoints with nontrivial kernels");

  CLI::App* vary = app.add_subcommand("vary", "Check the restriction identity for a varying subspace");
  common(vary);
  random_opts(vary);
  vary->add_option("--count", o.count, "Number of random trials")->capture_default_str();

  CLI::App* geodesic = app.add_subcommand("geodesic", "Spectral flow and Maslov data of a closed geodesic");
  common(geodesic);
  geodesic->add_option("--example", o.example, "Catalog frame (see --list-examples)");
  geodesic->add_option("--modes", o.modes, "Fourier modes of the Galerkin space (default 16)");
  geodesic->add_option("--curvature", o.curvature, "Curvature c for constant_curvature");
  geodesic->add_option("--n", o.fiber_dim, "Fiber dimension for flat_torus");
  geodesic->add_option("--trace", o.trace, "Write the eigenvalue trace of t -> B_t as CSV");
  geodesic->add_flag("--list-examples", list_examples, "List the catalog and exit");

  CLI::App* grassmann = app.add_subcommand("grassmann", "Indices and distances of a subspace pair");
  common(grassmann);
  random_opts(grassmann);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : sfkit::cli::kExitInputError;
  }

  if (list_examples) return emit({sfkit::cli::kExitOk, sfkit::cli::list_examples()}, output);

  RunResult (*command)(const RunOptions&) = nullptr;
  if (*path) command = sfkit::cli::run_path;
  if (*reduce) command = sfkit::cli::run_reduce;
  if (*vary) command = sfkit::cli::run_vary;
  if (*geodesic) command = sfkit::cli::run_geodesic;
  if (*grassmann) command = sfkit::cli::run_grassmann;
  if (command == nullptr) {
    std::cerr << app.help();
    return sfkit::cli::kExitInputError;
  }

  const RunResult result = sfkit::cli::guarded([&] {
    if (auto env = sfkit::cli::tolerance_from_env()) {
      o.tol.rel_zero = *env;
      o.tol_source = "env";
    }
    if (rel_tol) {
      o.tol.rel_zero = *rel_tol;
      o.tol_source = "cli";
    }
    o.tol.validate();
    return command(o);
  });
  return emit(result, output);
}
