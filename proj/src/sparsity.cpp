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

#include "framopt/sparsity.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <ostream>

namespace framopt {

std::vector<Monomial> sorted(const MonomialSet& s) {
  std::vector<Monomial> out(s.begin(), s.end());
  std::sort(out.begin(), out.end(), GrlexLess{});
  return out;
}

// ---- Graph ----

Graph::Graph(int n) : n_(n), bits_(static_cast<std::size_t>(n) * ((static_cast<std::size_t>(n) + 63) / 64), 0) {}

void Graph::add_edge(int u, int v) {
  row(u)[v / 64] |= std::uint64_t{1} << (v % 64);
  row(v)[u / 64] |= std::uint64_t{1} << (u % 64);
}

bool Graph::has_edge(int u, int v) const { return (row(u)[v / 64] >> (v % 64)) & 1U; }

std::vector<int> Graph::neighbors(int u) const {
  std::vector<int> out;
  for (int v = 0; v < n_; ++v)
    if (v != u && has_edge(u, v)) out.push_back(v);
  return out;
}

int Graph::degree(int u) const {
  int d = 0;
  const auto* r = row(u);
  for (std::size_t w = 0; w < words(); ++w) d += std::popcount(r[w]);
  return has_loop(u) ? d - 1 : d;
}

std::size_t Graph::edge_count() const {
  std::size_t twice = 0;
  for (int u = 0; u < n_; ++u) twice += static_cast<std::size_t>(degree(u));
  return twice / 2;
}

std::size_t Graph::loop_count() const {
  std::size_t c = 0;
  for (int u = 0; u < n_; ++u) c += has_loop(u) ? 1 : 0;
  return c;
}

bool Graph::is_complete() const {
  for (int u = 0; u < n_; ++u)
    if (degree(u) != n_ - 1) return false;
  return true;
}

bool Graph::contains(const Graph& other) const {
  if (other.n_ != n_) return false;
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if ((other.bits_[i] & ~bits_[i]) != 0) return false;
  return true;
}

std::vector<std::vector<int>> Graph::components() const {
  std::vector<int> label(static_cast<std::size_t>(n_), -1);
  std::vector<std::vector<int>> out;
  for (int s = 0; s < n_; ++s) {
    if (label[static_cast<std::size_t>(s)] >= 0) continue;
    const int id = static_cast<int>(out.size());
    std::vector<int> members{s};
    label[static_cast<std::size_t>(s)] = id;
    for (std::size_t head = 0; head < members.size(); ++head)
      for (int v : neighbors(members[head]))
        if (label[static_cast<std::size_t>(v)] < 0) {
          label[static_cast<std::size_t>(v)] = id;
          members.push_back(v);
        }
    std::sort(members.begin(), members.end());
    out.push_back(std::move(members));
  }
  return out;
}

void write_edge_list(std::ostream& os, const Graph& g) {
  for (int u = 0; u < g.size(); ++u)
    for (int v = u; v < g.size(); ++v)
      if (g.has_edge(u, v)) os << u << ' ' << v << '\n';
}

// ---- chordal extensions ----

std::string to_string(ChordalKind kind) {
  switch (kind) {
    case ChordalKind::maximal: return "maximal";
    case ChordalKind::min_fill: return "min-fill";
    case ChordalKind::min_degree: return "min-degree";
    case ChordalKind::max_cardinality: return "max-cardinality";
  }
  return "?";
}

namespace {

Graph complete_components(const Graph& g) {
  Graph out = g;
  for (const auto& comp : g.components())
    for (std::size_t a = 0; a < comp.size(); ++a)
      for (std::size_t b = a + 1; b < comp.size(); ++b) out.add_edge(comp[a], comp[b]);
  return out;
}

// Vertices not yet eliminated; adjacency is read from the filled graph.
struct Elimination {
  explicit Elimination(int n_) : n(n_), alive(static_cast<std::size_t>(n_), true) {}

  std::vector<int> live_neighbors(int u, const Graph& filled) const {
    std::vector<int> out;
    for (int v = 0; v < n; ++v)
      if (v != u && alive[static_cast<std::size_t>(v)] && filled.has_edge(u, v)) out.push_back(v);
    return out;
  }

  int n;
  std::vector<bool> alive;
};

std::size_t fill_count(const std::vector<int>& nb, const Graph& filled) {
  std::size_t missing = 0;
  for (std::size_t a = 0; a < nb.size(); ++a)
    for (std::size_t b = a + 1; b < nb.size(); ++b)
      if (!filled.has_edge(nb[a], nb[b])) ++missing;
  return missing;
}

// Greedy elimination ordering; min_fill and min_degree pick the next vertex
// by their score, max_cardinality eliminates in reverse MCS order.
Graph greedy_fill(const Graph& g, ChordalKind kind) {
  Graph filled = g;
  const int n = g.size();
  Elimination state(n);

  std::vector<int> order;
  if (kind == ChordalKind::max_cardinality) {
    // Maximum cardinality search; elimination follows the reverse visit order.
    std::vector<int> weight(static_cast<std::size_t>(n), 0);
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    std::vector<int> visit;
    for (int step = 0; step < n; ++step) {
      int best = -1;
      for (int v = 0; v < n; ++v)
        if (!seen[static_cast<std::size_t>(v)] &&
            (best < 0 || weight[static_cast<std::size_t>(v)] > weight[static_cast<std::size_t>(best)]))
          best = v;
      seen[static_cast<std::size_t>(best)] = true;
      visit.push_back(best);
      for (int v : g.neighbors(best)) ++weight[static_cast<std::size_t>(v)];
    }
    order.assign(visit.rbegin(), visit.rend());
  }

  for (int step = 0; step < n; ++step) {
    int pick = -1;
    if (kind == ChordalKind::max_cardinality) {
      pick = order[static_cast<std::size_t>(step)];
    } else {
      std::size_t best_fill = std::numeric_limits<std::size_t>::max();
      std::size_t best_deg = std::numeric_limits<std::size_t>::max();
      for (int v = 0; v < n; ++v) {
        if (!state.alive[static_cast<std::size_t>(v)]) continue;
        const auto nb = state.live_neighbors(v, filled);
        const std::size_t deg = nb.size();
        const std::size_t fill = kind == ChordalKind::min_fill ? fill_count(nb, filled) : deg;
        if (fill < best_fill || (fill == best_fill && deg < best_deg)) {
          best_fill = fill;
          best_deg = deg;
          pick = v;
        }
      }
    }
    const auto nb = state.live_neighbors(pick, filled);
    for (std::size_t a = 0; a < nb.size(); ++a)
      for (std::size_t b = a + 1; b < nb.size(); ++b) filled.add_edge(nb[a], nb[b]);
    state.alive[static_cast<std::size_t>(pick)] = false;
  }
  return filled;
}

}  // namespace

Graph chordal_extension(const Graph& g, ChordalKind kind) {
  if (kind == ChordalKind::maximal) return complete_components(g);
  return greedy_fill(g, kind);
}

bool is_chordal(const Graph& g) {
  const int n = g.size();
  std::vector<bool> alive(static_cast<std::size_t>(n), true);
  for (int removed = 0; removed < n; ++removed) {
    int simplicial = -1;
    for (int v = 0; v < n && simplicial < 0; ++v) {
      if (!alive[static_cast<std::size_t>(v)]) continue;
      std::vector<int> nb;
      for (int w : g.neighbors(v))
        if (alive[static_cast<std::size_t>(w)]) nb.push_back(w);
      bool clique = true;
      for (std::size_t a = 0; a < nb.size() && clique; ++a)
        for (std::size_t b = a + 1; b < nb.size() && clique; ++b) clique = g.has_edge(nb[a], nb[b]);
      if (clique) simplicial = v;
    }
    if (simplicial < 0) return false;
    alive[static_cast<std::size_t>(simplicial)] = false;
  }
  return true;
}

std::vector<Clique> maximal_cliques(const Graph& g) {
  const int n = g.size();
  // MCS visit order; position in it gives a perfect elimination ordering
  // when read backwards.
  std::vector<int> weight(static_cast<std::size_t>(n), 0);
  std::vector<int> position(static_cast<std::size_t>(n), -1);
  std::vector<int> visit;
  visit.reserve(static_cast<std::size_t>(n));
  for (int step = 0; step < n; ++step) {
    int best = -1;
    for (int v = 0; v < n; ++v)
      if (position[static_cast<std::size_t>(v)] < 0 &&
          (best < 0 || weight[static_cast<std::size_t>(v)] > weight[static_cast<std::size_t>(best)]))
        best = v;
    position[static_cast<std::size_t>(best)] = step;
    visit.push_back(best);
    for (int v : g.neighbors(best))
      if (position[static_cast<std::size_t>(v)] < 0) ++weight[static_cast<std::size_t>(v)];
  }

  // Candidate clique per vertex: itself plus its earlier-visited neighbours.
  std::vector<Clique> candidates;
  for (int v : visit) {
    Clique c{v};
    for (int w : g.neighbors(v))
      if (position[static_cast<std::size_t>(w)] < position[static_cast<std::size_t>(v)]) c.push_back(w);
    for (std::size_t a = 1; a < c.size(); ++a)
      for (std::size_t b = a + 1; b < c.size(); ++b)
        if (!g.has_edge(c[a], c[b])) throw std::logic_error("maximal_cliques: graph is not chordal");
    std::sort(c.begin(), c.end());
    candidates.push_back(std::move(c));
  }

  std::vector<Clique> out;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < candidates.size() && !dominated; ++j) {
      if (i == j || candidates[j].size() < candidates[i].size()) continue;
      if (candidates[j].size() == candidates[i].size() && (candidates[j] != candidates[i] || j > i)) continue;
      dominated = std::includes(candidates[j].begin(), candidates[j].end(), candidates[i].begin(), candidates[i].end());
    }
    if (!dominated) out.push_back(candidates[i]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---- term sparsity ----

MonomialSet initial_support(const ScaledPop& pop, int r, BasisKind kind) {
  MonomialSet s;
  for (const auto& m : support(pop.objective)) s.insert(m);
  for (const auto& g : pop.constraints)
    for (const auto& m : support(g)) s.insert(m);
  for (const auto& b : make_basis(kind, pop.n, r)) s.insert(square(b));
  return s;
}

Graph tsp_graph(const MonomialSet& support, const Basis& basis) {
  return extend_support(support, basis, {Monomial::one(basis.n())});
}

Graph extend_support(const MonomialSet& support, const Basis& basis, const std::vector<Monomial>& gammas) {
  const int q = static_cast<int>(basis.size());
  Graph g(q);
  for (int a = 0; a < q; ++a)
    for (int b = a; b < q; ++b) {
      const Monomial ab = basis[static_cast<std::size_t>(a)] * basis[static_cast<std::size_t>(b)];
      for (const auto& gamma : gammas)
        if (support.contains(ab * gamma)) {
          g.add_edge(a, b);
          break;
        }
    }
  return g;
}

std::string to_string(SparsityState::Stop stop) {
  switch (stop) {
    case SparsityState::Stop::running: return "running";
    case SparsityState::Stop::kmax: return "kmax";
    case SparsityState::Stop::stabilized: return "stabilized";
    case SparsityState::Stop::complete: return "complete";
    case SparsityState::Stop::guard: return "guard";
  }
  return "?";
}

SparsityState start_sparsity(const ScaledPop& pop, int r, BasisKind kind, ChordalKind chordal) {
  SparsityState st;
  st.r = r;
  st.basis_kind = kind;
  st.chordal = chordal;
  st.support = initial_support(pop, r, kind);

  ConstraintGraph moment{make_basis(kind, pop.n, r), {Monomial::one(pop.n)}, Graph(0), 1, false};
  moment.graph = tsp_graph(st.support, moment.basis);
  st.graphs.push_back(std::move(moment));

  for (const auto& g : pop.constraints) {
    const int d = half_degree(g);
    if (d > r) throw std::invalid_argument("relaxation order below the constraint half-degree");
    ConstraintGraph cg{make_basis(kind, pop.n, r - d), support(g), Graph(0), g.size(), false};
    cg.graph = Graph(static_cast<int>(cg.basis.size()));
    st.graphs.push_back(std::move(cg));
  }
  return st;
}

Graph support_extension(const SparsityState& state, int j) {
  const auto& cg = state.graphs[static_cast<std::size_t>(j)];
  return extend_support(state.support, cg.basis, cg.gammas);
}

MonomialSet update_support(const SparsityState& state) {
  MonomialSet s = state.support;
  for (const auto& cg : state.graphs) {
    const int q = cg.graph.size();
    for (int a = 0; a < q; ++a)
      for (int b = a; b < q; ++b) {
        if (!cg.graph.has_edge(a, b)) continue;
        const Monomial ab = cg.basis[static_cast<std::size_t>(a)] * cg.basis[static_cast<std::size_t>(b)];
        for (const auto& gamma : cg.gammas) s.insert(ab * gamma);
      }
  }
  return s;
}

bool step(SparsityState& state, double guard_factor) {
  bool all_stable = true;
  bool all_complete = true;
  std::vector<Graph> next;
  next.reserve(state.graphs.size());
  for (std::size_t j = 0; j < state.graphs.size(); ++j) {
    Graph g = chordal_extension(support_extension(state, static_cast<int>(j)), state.chordal);
    auto& cg = state.graphs[j];
    // The k = 0 localizing graphs are empty placeholders, so only k >= 1 counts.
    cg.stable = state.k >= 1 && g == cg.graph;
    all_stable = all_stable && cg.stable;
    all_complete = all_complete && g.is_complete();
    next.push_back(std::move(g));
  }

  if (state.chordal != ChordalKind::maximal) {
    std::size_t load = 0;
    double dense = 0.0;
    for (std::size_t j = 0; j < next.size(); ++j) {
      const auto s = static_cast<std::size_t>(state.graphs[j].side);
      for (const auto& c : maximal_cliques(next[j])) load += c.size() * c.size() * s * s;
      const double side = static_cast<double>(state.graphs[j].basis.size() * s);
      dense += side * side;
    }
    if (static_cast<double>(load) > guard_factor * dense) {
      state.guard_load = load;
      state.stop = SparsityState::Stop::guard;
      return false;
    }
  }

  for (std::size_t j = 0; j < next.size(); ++j) state.graphs[j].graph = std::move(next[j]);
  ++state.k;
  state.support = update_support(state);

  if (all_complete) state.stop = SparsityState::Stop::complete;
  else if (all_stable) state.stop = SparsityState::Stop::stabilized;
  return state.stop == SparsityState::Stop::running;
}

SparsityState iterate(const ScaledPop& pop, int r, BasisKind kind, ChordalKind chordal, int kmax,
                      double guard_factor) {
  if (kmax < 1) throw std::invalid_argument("sparsity order must be at least 1");
  auto st = start_sparsity(pop, r, kind, chordal);
  while (st.k < kmax)
    if (!step(st, guard_factor)) return st;
  st.stop = SparsityState::Stop::kmax;
  return st;
}

}  // namespace framopt
