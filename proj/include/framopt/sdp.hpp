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

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "framopt/relaxation.hpp"

namespace framopt {

enum class Backend { embedded, exporter };

struct SolverConfig {
  Backend backend = Backend::embedded;
  // Relative duality gap and infeasibility target, in (0, 1e-2].
  double tolerance = 1e-8;
  int max_iterations = 200;
  std::size_t memory_cap = framopt::memory_cap();
  // Per-iteration trace when set.
  std::ostream* log = nullptr;

  void check() const;
};

// Solver-side view of a solved problem, for residual checks.
struct SdpResult {
  MomentSolution solution;
  // Dual matrices X and slacks S, one per block with side > 1, in problem
  // order, then the merged 1x1 blocks as vectors.
  std::vector<Eigen::MatrixXd> x, s;
  Eigen::VectorXd x_diag, s_diag;
};

// Bytes the embedded solver would allocate.
std::size_t solver_memory_estimate(const SdpProblem& problem);

// min c'y s.t. C + sum y_i A_i >= 0 with NT-scaled Mehrotra predictor-corrector.
// Throws MemoryCapError (pointing at export-sdpa) above the cap.
SdpResult solve_detailed(const SdpProblem& problem, const SolverConfig& cfg = {});
MomentSolution solve(const SdpProblem& problem, const SolverConfig& cfg = {});

// SDPA sparse format. All 1x1 blocks go to one trailing diagonal block
// (negative size); F_0 is minus the constant matrix.
void write_sdpa(std::ostream& os, const SdpProblem& problem);
std::string to_sdpa(const SdpProblem& problem);
void export_sdpa(const SdpProblem& problem, const std::filesystem::path& path);

class SdpaFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Reads a .dat-s file back; the diagonal block expands into 1x1 blocks and
// constraint/clique tags are not recoverable.
SdpProblem parse_sdpa(const std::string& text);
SdpProblem read_sdpa(const std::filesystem::path& path);

// Solution file: either a plain whitespace-separated list of nvar values or an
// SDPA result file with an "xVec" section. The objective is recomputed from
// the problem.
MomentSolution parse_solution_text(const std::string& text, const SdpProblem& problem);
MomentSolution parse_solution(const std::filesystem::path& path, const SdpProblem& problem);

}  // namespace framopt
