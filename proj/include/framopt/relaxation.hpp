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
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "framopt/monomial.hpp"
#include "framopt/pop.hpp"
#include "framopt/sparsity.hpp"

namespace framopt {

enum class Method { dense, tsp_max, tsp_min, nmt, nmt_tsp };

std::string to_string(Method method);
std::optional<Method> parse_method(const std::string& name);
BasisKind basis_kind(Method method);
bool uses_term_sparsity(Method method);
// tsp-max completes components, the other sparse methods use min-fill.
ChordalKind chordal_kind(Method method);

// Monomial -> variable id; id 0 is the constant (y_0 = 1).
class MomentIndex {
 public:
  explicit MomentIndex(int n = 0);

  int n() const { return n_; }
  // Insert-or-get.
  int id(const Monomial& m);
  std::optional<int> find(const Monomial& m) const;
  const Monomial& monomial(int id) const { return monomials_[static_cast<std::size_t>(id)]; }
  const std::vector<Monomial>& monomials() const { return monomials_; }
  std::size_t size() const { return monomials_.size(); }
  std::size_t nvar() const { return monomials_.size() - 1; }

  // Renumbers into grlex order (constant stays 0); returns old id -> new id.
  std::vector<int> canonicalize();

 private:
  int n_;
  std::vector<Monomial> monomials_;
  std::unordered_map<Monomial, int, MonomialHash> ids_;
};

// Coefficient of variable `var` at (row, col), row <= col. var 0 is the
// constant matrix.
struct BlockEntry {
  int var = 0;
  int row = 0;
  int col = 0;
  double value = 0.0;

  friend bool operator==(const BlockEntry&, const BlockEntry&) = default;
};

// Affine symmetric block sum_v y_v A_v >= 0.
struct SdpBlock {
  int constraint = 0;  // 0 is the moment matrix
  int clique = 0;
  int size = 0;
  // Sorted by (var, row, col), no duplicates, no zeros.
  std::vector<BlockEntry> entries;
};

// min  objective_constant + sum_v objective[v] y_v  over y_1..y_nvar.
struct SdpProblem {
  std::size_t nvar = 0;
  std::vector<SdpBlock> blocks;
  double objective_constant = 0.0;
  // Sorted by var, var >= 1.
  std::vector<std::pair<int, double>> objective;
};

// (count, size) pairs, ascending by size.
using Signature = std::vector<std::pair<std::size_t, int>>;

Signature signature(const SdpProblem& sdp);
// "(22,23),(1,276),(1,368)"
std::string format_signature(const Signature& sig);

// Block value at y (size nvar + 1, y[0] = 1), dense symmetric.
Eigen::MatrixXd evaluate(const SdpBlock& block, const Eigen::VectorXd& y);
double evaluate_objective(const SdpProblem& sdp, const Eigen::VectorXd& y);

// Moment matrix over an ordered basis subset (entries (a, b) -> y_{a*b}).
SdpBlock moment_matrix(const std::vector<Monomial>& basis_sub, MomentIndex& index);
// Localizing matrix of g: entry block (a, b) = sum_gamma y_{a*b*gamma} G_gamma,
// row index a * g.size() + p.
SdpBlock localizing_matrix(const PolyMatrixd& g, const std::vector<Monomial>& basis_sub, MomentIndex& index);

class MemoryCapError : public std::runtime_error {
 public:
  MemoryCapError(std::size_t estimate, std::size_t cap,
                 const std::string& hint = "set FRAMOPT_MEMCAP to raise it");
  std::size_t estimate;
  std::size_t cap;
};

// Default 2 GiB; FRAMOPT_MEMCAP overrides (plain bytes or K/M/G suffix).
std::size_t memory_cap();
std::optional<std::size_t> parse_byte_size(const std::string& text);

struct PlannedBlock {
  int constraint = 0;
  int clique = 0;
  // Indices into the constraint's basis, ascending.
  std::vector<int> members;
  int side = 0;
};

// Everything about a relaxation that can be known without materializing it.
struct RelaxationPlan {
  Method method = Method::dense;
  int r = 0;
  int k = 0;
  // Per constraint j (0 = moment): the truncated active basis.
  std::vector<Basis> bases;
  std::vector<PlannedBlock> blocks;
  Signature signature;
  std::size_t nvar = 0;
  // Rough bytes for the coefficient entries plus a dense Schur complement.
  std::size_t bytes = 0;
  std::optional<SparsityState> sparsity;
};

// Throws SparsityGuardError when the clique guard fired.
RelaxationPlan plan_relaxation(const ScaledPop& pop, Method method, int r, int k = 1);

struct Relaxation {
  RelaxationPlan plan;
  SdpProblem sdp;
  MomentIndex index;
};

Relaxation assemble(const ScaledPop& pop, const RelaxationPlan& plan);
// Plans, checks the estimate against `cap`, then assembles.
Relaxation assemble(const ScaledPop& pop, Method method, int r, int k = 1, std::size_t cap = memory_cap());

// y_gamma = x^gamma for every indexed monomial.
Eigen::VectorXd dirac_moments(const MomentIndex& index, const Eigen::VectorXd& x);
// y_{x_i} for i < count; missing monomials read as 0.
Eigen::VectorXd first_order_moments(const MomentIndex& index, const Eigen::VectorXd& y, int count);

enum class SolveStatus { optimal, near_optimal, infeasible, numerical_failure };

std::string to_string(SolveStatus status);

struct MomentSolution {
  // Size nvar + 1, y[0] = 1.
  Eigen::VectorXd y;
  double objective = 0.0;
  SolveStatus status = SolveStatus::numerical_failure;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  int iterations = 0;
};

using SdpSolver = std::function<MomentSolution(const SdpProblem&)>;

struct LadderCell {
  Method method = Method::dense;
  int r = 0;
  int k = 0;
  std::optional<double> bound;
  std::string error;
};

struct Ladder {
  std::vector<LadderCell> cells;
  // Pairs of cells (lower, higher) that break the expected ordering.
  std::vector<std::pair<std::size_t, std::size_t>> violations;
};

// Per order r: the sparse cells for every k, then the dense counterpart
// (dense, or nmt for nmt-tsp). Checks the chain f_r^(1) <= ... <= f_r and
// f_r <= f_{r+1} within 1e-6 * (1 + |f|). Failed cells keep the ladder going.
Ladder lower_bound_ladder(const ScaledPop& pop, std::span<const int> orders, Method method,
                          std::span<const int> sparsity_orders, const SdpSolver& solve);

}  // namespace framopt
