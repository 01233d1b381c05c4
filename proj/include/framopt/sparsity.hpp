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

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "framopt/monomial.hpp"
#include "framopt/pop.hpp"

namespace framopt {

using MonomialSet = std::unordered_set<Monomial, MonomialHash>;

// Sorted (grlex) copy, for deterministic iteration.
std::vector<Monomial> sorted(const MonomialSet& s);

// Undirected graph on 0..n-1 with explicit self-loops, stored as bit rows.
class Graph {
 public:
  explicit Graph(int n = 0);

  int size() const { return n_; }
  void add_edge(int u, int v);
  bool has_edge(int u, int v) const;
  bool has_loop(int u) const { return has_edge(u, u); }
  // Neighbours other than u itself, ascending.
  std::vector<int> neighbors(int u) const;
  int degree(int u) const;
  // Edges between distinct vertices.
  std::size_t edge_count() const;
  std::size_t loop_count() const;
  // Every pair of distinct vertices adjacent.
  bool is_complete() const;
  // Edge set (loops included) is a superset of other's.
  bool contains(const Graph& other) const;
  // Connected components ignoring loops; each sorted, ordered by minimum.
  std::vector<std::vector<int>> components() const;

  friend bool operator==(const Graph& a, const Graph& b) { return a.n_ == b.n_ && a.bits_ == b.bits_; }

 private:
  std::size_t words() const { return (static_cast<std::size_t>(n_) + 63) / 64; }
  const std::uint64_t* row(int u) const { return bits_.data() + static_cast<std::size_t>(u) * words(); }
  std::uint64_t* row(int u) { return bits_.data() + static_cast<std::size_t>(u) * words(); }

  int n_ = 0;
  std::vector<std::uint64_t> bits_;
};

// "u v" per line, basis indices, loops included.
void write_edge_list(std::ostream& os, const Graph& g);

enum class ChordalKind { maximal, min_fill, min_degree, max_cardinality };

std::string to_string(ChordalKind kind);

// maximal: complete each connected component. Otherwise greedy elimination
// with the named heuristic; min_fill breaks ties on smaller degree, then
// lower index. Loops are left as they are.
Graph chordal_extension(const Graph& g, ChordalKind kind);

// Independent check by repeated removal of simplicial vertices.
bool is_chordal(const Graph& g);

using Clique = std::vector<int>;

// Maximal cliques of a chordal graph via maximum cardinality search; every
// vertex is covered (isolated vertices give singletons). Sorted members,
// cliques ordered by smallest member. Throws std::logic_error when g is not
// chordal.
std::vector<Clique> maximal_cliques(const Graph& g);

// S = supp(f) + U_j supp(G_j) + squares of the active order-r basis.
MonomialSet initial_support(const ScaledPop& pop, int r, BasisKind kind);

// Edge {a, b} iff a*b is in S.
Graph tsp_graph(const MonomialSet& support, const Basis& basis);

// Edge {a, b} iff a*b*g is in S for some g in gammas.
Graph extend_support(const MonomialSet& support, const Basis& basis, const std::vector<Monomial>& gammas);

class SparsityGuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ConstraintGraph {
  // b_{r - d_j} of the active basis kind.
  Basis basis;
  std::vector<Monomial> gammas;
  Graph graph;
  // Side of G_j; a clique C becomes a block of side |C| * side.
  int side = 1;
  bool stable = false;
};

struct SparsityState {
  enum class Stop { running, kmax, stabilized, complete, guard };

  int r = 0;
  int k = 0;
  BasisKind basis_kind = BasisKind::standard;
  ChordalKind chordal = ChordalKind::maximal;
  // j = 0 is the moment graph (G_0 = 1, d_0 = 0).
  std::vector<ConstraintGraph> graphs;
  MonomialSet support;
  Stop stop = Stop::running;
  // Sum of squared block sides over all cliques when the guard tripped.
  std::size_t guard_load = 0;
};

std::string to_string(SparsityState::Stop stop);

// k = 0: moment graph is the TSP graph, localizing graphs are empty.
SparsityState start_sparsity(const ScaledPop& pop, int r, BasisKind kind, ChordalKind chordal);

// F_{r,j}^{(k)} from S^{(k-1)}.
Graph support_extension(const SparsityState& state, int j);

// S^{(k-1)} plus every a*b*g over edges of the current graphs.
MonomialSet update_support(const SparsityState& state);

// One round for all j; returns false once a stopping rule fired. The guard
// fires (and the round is discarded) when the clique blocks would hold more
// than guard_factor times the entries of the dense relaxation.
bool step(SparsityState& state, double guard_factor = 4.0);

// Runs rounds up to kmax or an earlier stop.
SparsityState iterate(const ScaledPop& pop, int r, BasisKind kind, ChordalKind chordal, int kmax,
                      double guard_factor = 4.0);

}  // namespace framopt
