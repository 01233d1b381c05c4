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

#include <random>
#include <vector>

#include "framopt/monomial.hpp"
#include "framopt/sparsity.hpp"

namespace framopt::testing {

inline Graph random_graph(std::mt19937_64& rng, int n, double p) {
  Graph g(n);
  std::bernoulli_distribution edge(p);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (edge(rng)) g.add_edge(u, v);
  return g;
}

// Monomials that sit with the constant in the k = 0 TSP graph: at most one
// odd exponent (the constant and pure powers included).
inline bool in_constant_component(const Monomial& m) {
  int odd = 0;
  for (int i = 0; i < m.n(); ++i) odd += m[i] % 2;
  return odd <= 1;
}

// Symmetric matrix with entries only on the graph's edges and diagonal.
inline Eigen::MatrixXd patterned_matrix(std::mt19937_64& rng, const Graph& g, double diag_shift) {
  std::normal_distribution<double> normal;
  const int n = g.size();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int u = 0; u < n; ++u) {
    a(u, u) = normal(rng) + diag_shift;
    for (int v : g.neighbors(u))
      if (v > u) a(u, v) = a(v, u) = normal(rng);
  }
  return a;
}

}  // namespace framopt::testing

namespace framopt::testing {

// Perfect elimination ordering by repeatedly removing a simplicial vertex;
// empty when the graph is not chordal.
inline std::vector<int> perfect_elimination_order(const Graph& g) {
  const int n = g.size();
  std::vector<bool> gone(static_cast<std::size_t>(n), false);
  std::vector<int> order;
  for (int step = 0; step < n; ++step) {
    int pick = -1;
    for (int v = 0; v < n && pick < 0; ++v) {
      if (gone[static_cast<std::size_t>(v)]) continue;
      std::vector<int> nb;
      for (int w : g.neighbors(v))
        if (!gone[static_cast<std::size_t>(w)]) nb.push_back(w);
      bool simplicial = true;
      for (std::size_t a = 0; a < nb.size() && simplicial; ++a)
        for (std::size_t b = a + 1; b < nb.size() && simplicial; ++b) simplicial = g.has_edge(nb[a], nb[b]);
      if (simplicial) pick = v;
    }
    if (pick < 0) return {};
    gone[static_cast<std::size_t>(pick)] = true;
    order.push_back(pick);
  }
  return order;
}

// Maximum-determinant completion of the entries of `partial` on the pattern
// of chordal g: walking the elimination order backwards, each free entry
// (v, w) becomes M(v, N) M(N, N)^-1 M(N, w) with N the later neighbours of v.
// Needs clique-wise positive definite data.
inline Eigen::MatrixXd max_det_completion(const Eigen::MatrixXd& partial, const Graph& g) {
  const auto order = perfect_elimination_order(g);
  const int n = g.size();
  std::vector<int> pos(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) pos[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = i;
  Eigen::MatrixXd m = partial;
  for (int i = n - 2; i >= 0; --i) {
    const int v = order[static_cast<std::size_t>(i)];
    std::vector<int> later, nb;
    for (int k = i + 1; k < n; ++k) later.push_back(order[static_cast<std::size_t>(k)]);
    for (int w : later)
      if (g.has_edge(v, w)) nb.push_back(w);
    const auto s = static_cast<Eigen::Index>(nb.size());
    Eigen::MatrixXd mnn(s, s);
    Eigen::VectorXd mvn(s);
    for (Eigen::Index a = 0; a < s; ++a) {
      mvn[a] = m(v, nb[static_cast<std::size_t>(a)]);
      for (Eigen::Index b = 0; b < s; ++b) mnn(a, b) = m(nb[static_cast<std::size_t>(a)], nb[static_cast<std::size_t>(b)]);
    }
    const Eigen::VectorXd coef = s ? Eigen::VectorXd(mnn.ldlt().solve(mvn)) : Eigen::VectorXd();
    for (int w : later) {
      if (g.has_edge(v, w)) continue;
      double val = 0.0;
      for (Eigen::Index a = 0; a < s; ++a) val += coef[a] * m(nb[static_cast<std::size_t>(a)], w);
      m(v, w) = m(w, v) = val;
    }
  }
  return m;
}

inline double min_eigenvalue(const Eigen::MatrixXd& m) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

inline Eigen::MatrixXd principal(const Eigen::MatrixXd& m, const std::vector<int>& idx) {
  const auto k = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd s(k, k);
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = 0; b < k; ++b) s(a, b) = m(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
  return s;
}

// Zero-fill LDL' along the elimination order, each rank-one term assigned to a
// maximal clique holding its support. Returns per-clique pieces (full size).
inline std::vector<Eigen::MatrixXd> clique_decomposition(const Eigen::MatrixXd& m, const Graph& g,
                                                         const std::vector<Clique>& cliques) {
  const auto order = perfect_elimination_order(g);
  const int n = g.size();
  std::vector<Eigen::MatrixXd> pieces(cliques.size(), Eigen::MatrixXd::Zero(n, n));
  Eigen::MatrixXd rest = m;
  for (int v : order) {
    const double d = rest(v, v);
    if (d <= 0.0) return {};
    const Eigen::VectorXd col = rest.col(v) / d;
    const Eigen::MatrixXd term = d * col * col.transpose();
    std::vector<int> supp;
    for (int w = 0; w < n; ++w)
      if (std::abs(col[w]) > 0.0) supp.push_back(w);
    std::size_t home = cliques.size();
    for (std::size_t c = 0; c < cliques.size() && home == cliques.size(); ++c) {
      const auto& cl = cliques[c];
      if (std::all_of(supp.begin(), supp.end(), [&](int w) { return std::binary_search(cl.begin(), cl.end(), w); }))
        home = c;
    }
    if (home == cliques.size()) return {};
    pieces[home] += term;
    rest -= term;
    // Exact zero on the eliminated row; x/d*d may not round back to x.
    rest.row(v).setZero();
    rest.col(v).setZero();
  }
  return pieces;
}

}  // namespace framopt::testing
