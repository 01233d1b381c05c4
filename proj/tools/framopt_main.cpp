// Copyright 2026 The framopt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "framopt/model_io.hpp"
#include "framopt/pipeline.hpp"

using namespace framopt;

namespace {

constexpr int kUsageError = 2;

const std::vector<std::string> kMethodNames = {"dense", "tsp-max", "tsp-min", "nmt", "nmt-tsp"};

struct Common {
  std::string model;
  std::string mode = "weight";
  std::string bound = "auto";
  int order = 1;
  int sparsity = 1;
};

void add_problem_flags(CLI::App* cmd, Common& c) {
  cmd->add_option("--mode", c.mode, "compliance or weight")->check(CLI::IsMember({"compliance", "weight"}));
  cmd->add_option("--order", c.order, "relaxation order r")->check(CLI::PositiveNumber);
  cmd->add_option("--sparsity", c.sparsity, "sparsity order k")->check(CLI::PositiveNumber);
  cmd->add_option("--bound", c.bound, "wbar (compliance mode) or cbar (weight mode), or auto");
}

std::optional<double> parse_bound(const std::string& text) {
  if (text == "auto") return std::nullopt;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || !(v > 0.0)) throw CLI::ValidationError("--bound", "expected a positive number or auto");
  return v;
}

int cmd_validate(const std::string& path) {
  FrameModel model;
  try {
    model = load_model(resolve_model_path(path));
  } catch (const std::exception& ex) {
    std::cout << "error: " << ex.what() << "\n";
    return 1;
  }
  bool clean = true;
  for (const auto& d : validate(model)) {
    const bool err = d.severity == Diagnostic::Severity::error;
    clean = clean && !err;
    std::cout << (err ? "error: " : "info: ") << d.message << "\n";
  }
  std::cout << model.name << ": " << (clean ? "clean" : "violations found") << "\n";
  return clean ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Global frame topology optimization through moment-SOS relaxations"};
  app.require_subcommand(1);

  Common run_opts;
  std::string run_method = "dense";
  std::string backend = "embedded";
  double tol = 1e-8;
  int max_iter = 200;
  std::string out_dir, solution;
  bool svg = false;
  std::uint64_t seed = 0;
  auto* run_cmd = app.add_subcommand("run", "solve one relaxation and certify the design");
  run_cmd->add_option("--model", run_opts.model, "bundled model name or JSON file")->required();
  add_problem_flags(run_cmd, run_opts);
  run_cmd->add_option("--method", run_method, "dense, tsp-max, tsp-min, nmt or nmt-tsp")
      ->check(CLI::IsMember(kMethodNames));
  run_cmd->add_option("--solver", backend, "embedded or export")->check(CLI::IsMember({"embedded", "export"}));
  run_cmd->add_option("--tol", tol, "relative gap and infeasibility target");
  run_cmd->add_option("--max-iter", max_iter, "interior-point iteration limit")->check(CLI::PositiveNumber);
  run_cmd->add_option("--out", out_dir, "directory for manifest, reports and design");
  run_cmd->add_option("--solution", solution, "external solver result to certify (with --solver export)");
  run_cmd->add_flag("--svg", svg, "also draw the design as SVG");
  run_cmd->add_option("--seed", seed, "recorded in the manifest");

  Common table_opts;
  table_opts.mode = "compliance";
  std::vector<std::string> table_models;
  std::vector<std::string> table_methods;
  bool structure_only = false;
  auto* table_cmd = app.add_subcommand("table", "method comparison table");
  table_cmd->add_option("--model", table_models, "one or more models")->required();
  add_problem_flags(table_cmd, table_opts);
  table_cmd->add_option("--method", table_methods, "methods, one row each")->check(CLI::IsMember(kMethodNames));
  table_cmd->add_option("--tol", tol, "relative gap and infeasibility target");
  table_cmd->add_flag("--structure-only", structure_only, "skip solving, print structure columns");

  std::string validate_model;
  auto* validate_cmd = app.add_subcommand("validate", "check a model for structural problems");
  validate_cmd->add_option("--model", validate_model, "bundled model name or JSON file")->required();

  Common export_opts;
  std::string export_method = "dense";
  std::string export_path;
  auto* export_cmd = app.add_subcommand("export-sdpa", "write a relaxation in SDPA sparse format");
  export_cmd->add_option("--model", export_opts.model, "bundled model name or JSON file")->required();
  add_problem_flags(export_cmd, export_opts);
  export_cmd->add_option("--method", export_method, "dense, tsp-max, tsp-min, nmt or nmt-tsp")
      ->check(CLI::IsMember(kMethodNames));
  export_cmd->add_option("--out", export_path, "output .dat-s file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (validate_cmd->parsed()) return cmd_validate(validate_model);

    if (run_cmd->parsed()) {
      RunManifest m;
      m.model = run_opts.model;
      m.mode = *parse_mode(run_opts.mode);
      m.bound = parse_bound(run_opts.bound);
      m.method = *parse_method(run_method);
      m.order = run_opts.order;
      m.sparsity = run_opts.sparsity;
      m.solver.backend = backend == "export" ? Backend::exporter : Backend::embedded;
      m.solver.tolerance = tol;
      m.solver.max_iterations = max_iter;
      if (!solution.empty()) m.solution = solution;
      m.out = out_dir;
      m.svg = svg;
      m.seed = seed;
      if (m.solver.backend == Backend::exporter && out_dir.empty())
        throw CLI::ValidationError("--out", "the export backend needs an output directory");
      const Instance inst = load_instance(m.model, m.mode, m.bound);
      const RunReport report = run(m, inst);
      std::cout << format_report(report);
      if (!out_dir.empty()) write_outputs(m, inst, report);
      return report.error.empty() ? 0 : 1;
    }

    if (table_cmd->parsed()) {
      TableRequest req;
      req.models = table_models;
      for (const auto& name : table_methods) req.methods.push_back(*parse_method(name));
      req.mode = *parse_mode(table_opts.mode);
      req.bound = parse_bound(table_opts.bound);
      req.order = table_opts.order;
      req.sparsity = table_opts.sparsity;
      req.solve = !structure_only;
      req.solver.tolerance = tol;
      std::cout << format_table(table_rows(req), table_models.size() > 1);
      return 0;
    }

    if (export_cmd->parsed()) {
      RunManifest m;
      m.model = export_opts.model;
      m.mode = *parse_mode(export_opts.mode);
      m.bound = parse_bound(export_opts.bound);
      m.method = *parse_method(export_method);
      m.order = export_opts.order;
      m.sparsity = export_opts.sparsity;
      const Instance inst = load_instance(m.model, m.mode, m.bound);
      const auto plan = plan_relaxation(inst.pop, m.method, m.order, m.sparsity);
      const std::size_t schur = 8 * plan.nvar * plan.nvar;
      const std::size_t needed = plan.bytes > schur ? plan.bytes - schur : plan.bytes;
      if (needed > memory_cap()) throw MemoryCapError(needed, memory_cap());
      const Relaxation rel = assemble(inst.pop, plan);
      export_sdpa(rel.sdp, export_path);
      std::cout << format_signature(plan.signature) << " | " << plan.nvar << "\n";
      return 0;
    }
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  } catch (const std::exception& ex) {
    std::cerr << "framopt: " << ex.what() << "\n";
    return 1;
  }
  return kUsageError;
}
