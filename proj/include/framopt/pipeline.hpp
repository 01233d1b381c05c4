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

#pragma once

#include <Eigen/Dense>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "framopt/certify.hpp"
#include "framopt/frame.hpp"
#include "framopt/pop.hpp"
#include "framopt/relaxation.hpp"
#include "framopt/sdp.hpp"

namespace framopt {

// Everything that determines a run; written next to its outputs.
struct RunManifest {
  std::string model;
  Mode mode = Mode::weight;
  // nullopt means "auto".
  std::optional<double> bound;
  Method method = Method::dense;
  int order = 1;
  int sparsity = 1;
  SolverConfig solver;
  // External solution to certify instead of solving (export backend only).
  std::optional<std::filesystem::path> solution;
  std::filesystem::path out;
  bool svg = false;
  // Only used by randomized property suites.
  std::uint64_t seed = 0;

  std::string to_json() const;
};

struct RunReport {
  std::string model_name;
  Mode mode = Mode::weight;
  Bounds bounds;
  std::string signature;
  std::size_t nvar = 0;
  std::size_t bytes = 0;
  std::optional<double> lower;
  std::optional<SolveStatus> status;
  int iterations = 0;
  std::optional<CertificateReport> certificate;
  std::optional<std::filesystem::path> sdpa_file;
  double seconds = 0.0;
  // Empty unless some stage refused or failed; `refused` marks memory-cap and
  // sparsity-guard refusals.
  std::string error;
  bool refused = false;
};

// Model, stiffness and scaled problem resolved from a manifest.
struct Instance {
  FrameModel model;
  StiffnessCoeffs<double> coeffs;
  Bounds bounds;
  ScaledPop pop;
};

Instance load_instance(const std::string& model, Mode mode, std::optional<double> bound);

// Structure, bound and certificate. Errors from the relaxation and solver
// stages end up in report.error; model and bound errors propagate.
RunReport run(const RunManifest& manifest, const Instance& instance);
RunReport run(const RunManifest& manifest);

// Writes manifest.json, report.json, report.txt, design.csv and optionally
// design.svg into manifest.out (created if missing).
void write_outputs(const RunManifest& manifest, const Instance& instance, const RunReport& report);
std::string format_report(const RunReport& report);

// One line segment per element, width proportional to area; elements below
// 1e-6 of the largest area are left out.
std::string render_svg(const FrameModel& model, const Eigen::VectorXd& areas);

struct TableRequest {
  std::vector<std::string> models;
  std::vector<Method> methods;
  Mode mode = Mode::compliance;
  std::optional<double> bound;
  int order = 1;
  int sparsity = 1;
  // Structure columns only; l.b., time and eps_rel print as dashes.
  bool solve = true;
  SolverConfig solver;
};

struct TableRow {
  std::string model;
  std::string method;
  std::string signature;
  std::string nvar;
  std::string lower;
  std::string time;
  std::string eps_rel;
};

inline constexpr const char* kDash = "—";

std::vector<TableRow> table_rows(const TableRequest& request);
// Method | (n_c,s) | nvar | l.b. | time | eps_rel, columns padded; a model
// column is added when more than one model is listed.
std::string format_table(const std::vector<TableRow>& rows, bool with_model);

}  // namespace framopt
