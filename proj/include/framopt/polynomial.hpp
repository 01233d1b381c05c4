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

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "framopt/monomial.hpp"

namespace framopt {

// Coefficients below this magnitude are dropped after arithmetic.
inline constexpr double kCoefficientCutoff = 1e-14;

template <typename Scalar>
Scalar monomial_value(const Monomial& m, const Eigen::Ref<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>& x) {
  Scalar v(1);
  for (int i = 0; i < m.n(); ++i) {
    for (int p = 0; p < m[i]; ++p) v *= x[i];
  }
  return v;
}

// Sparse multivariate polynomial in canonical form.
template <typename Scalar = double>
class Polynomial {
 public:
  using Terms = std::map<Monomial, Scalar, GrlexLess>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  explicit Polynomial(int n = 0) : n_(n) {}

  static Polynomial constant(int n, Scalar c) {
    Polynomial p(n);
    p.add_term(Monomial::one(n), c);
    return p;
  }
  static Polynomial variable(int n, int i) {
    Polynomial p(n);
    p.add_term(Monomial::variable(n, i), Scalar(1));
    return p;
  }

  int n() const { return n_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const {
    int d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
    return d;
  }
  Scalar coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Scalar(0) : it->second;
  }

  void add_term(const Monomial& m, Scalar c) {
    if (m.n() != n_) throw std::invalid_argument("polynomial variable count mismatch");
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) it->second += c;
    using std::abs;
    if (abs(it->second) < Scalar(kCoefficientCutoff)) terms_.erase(it);
  }

  Polynomial& operator+=(const Polynomial& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  Polynomial& operator*=(Scalar s) {
    Polynomial out(n_);
    for (const auto& [m, c] : terms_) out.add_term(m, c * s);
    *this = std::move(out);
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, Scalar s) { return a *= s; }
  friend Polynomial operator*(Scalar s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Polynomial out(a.n_);
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) out.add_term(ma * mb, ca * cb);
    return out;
  }
  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.n_ == b.n_ && a.terms_ == b.terms_;
  }

 private:
  int n_;
  Terms terms_;
};

// Symmetric-matrix-valued polynomial: monomial -> symmetric coefficient block.
template <typename Scalar = double>
class PolyMatrix {
 public:
  using Block = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Terms = std::map<Monomial, Block, GrlexLess>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  PolyMatrix(int n = 0, int size = 1) : n_(n), size_(size) {
    if (size < 1) throw std::invalid_argument("PolyMatrix size must be positive");
  }

  static PolyMatrix from_polynomial(const Polynomial<Scalar>& p) {
    PolyMatrix g(p.n(), 1);
    for (const auto& [m, c] : p.terms()) g.add_term(m, Block::Constant(1, 1, c));
    return g;
  }

  int n() const { return n_; }
  int size() const { return size_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const {
    int d = 0;
    for (const auto& [m, b] : terms_) d = std::max(d, m.degree());
    return d;
  }
  Block coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Block::Zero(size_, size_) : it->second;
  }

  // Accumulates block at monomial m; block must be symmetric to 1e-12.
  void add_term(const Monomial& m, const Block& block) {
    if (m.n() != n_) throw std::invalid_argument("polynomial variable count mismatch");
    if (block.rows() != size_ || block.cols() != size_)
      throw std::invalid_argument("coefficient block has wrong size");
    using std::abs;
    if (((block - block.transpose()).cwiseAbs().array() > Scalar(1e-12)).any())
      throw std::invalid_argument("coefficient block is not symmetric");
    const Block sym = (block + block.transpose()) / Scalar(2);
    auto it = terms_.try_emplace(m, Block::Zero(size_, size_)).first;
    Block& b = it->second;
    b += sym;
    bool any = false;
    for (Eigen::Index i = 0; i < b.size(); ++i) {
      if (abs(b.data()[i]) < Scalar(kCoefficientCutoff)) b.data()[i] = Scalar(0);
      else any = true;
    }
    if (!any) terms_.erase(it);
  }

  // Accumulates value at (row, col) and its mirror.
  void add_entry(const Monomial& m, int row, int col, Scalar value) {
    Block b = Block::Zero(size_, size_);
    b(row, col) += value;
    if (row != col) b(col, row) += value;
    add_term(m, b);
  }

  void add_entry(const Polynomial<Scalar>& p, int row, int col) {
    for (const auto& [m, c] : p.terms()) add_entry(m, row, col, c);
  }

  Polynomial<Scalar> entry(int row, int col) const {
    Polynomial<Scalar> p(n_);
    for (const auto& [m, b] : terms_) p.add_term(m, b(row, col));
    return p;
  }

 private:
  int n_;
  int size_;
  Terms terms_;
};

template <typename Scalar>
std::vector<Monomial> support(const Polynomial<Scalar>& p) {
  std::vector<Monomial> s;
  s.reserve(p.terms().size());
  for (const auto& [m, c] : p.terms()) s.push_back(m);
  return s;
}

template <typename Scalar>
std::vector<Monomial> support(const PolyMatrix<Scalar>& g) {
  std::vector<Monomial> s;
  s.reserve(g.terms().size());
  for (const auto& [m, b] : g.terms()) s.push_back(m);
  return s;
}

template <typename Scalar, typename Derived>
Scalar evaluate(const Polynomial<Scalar>& p, const Eigen::MatrixBase<Derived>& x) {
  if (x.size() != p.n()) throw std::invalid_argument("evaluation point has wrong dimension");
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> xv = x.template cast<Scalar>();
  Scalar v(0);
  for (const auto& [m, c] : p.terms()) v += c * monomial_value<Scalar>(m, xv);
  return v;
}

template <typename Scalar, typename Derived>
typename PolyMatrix<Scalar>::Block evaluate(const PolyMatrix<Scalar>& g, const Eigen::MatrixBase<Derived>& x) {
  if (x.size() != g.n()) throw std::invalid_argument("evaluation point has wrong dimension");
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> xv = x.template cast<Scalar>();
  typename PolyMatrix<Scalar>::Block out = PolyMatrix<Scalar>::Block::Zero(g.size(), g.size());
  for (const auto& [m, b] : g.terms()) out += monomial_value<Scalar>(m, xv) * b;
  return out;
}

// d_j = ceil(deg G / 2).
template <typename P>
int half_degree(const P& p) {
  return (p.degree() + 1) / 2;
}

using Polynomiald = Polynomial<double>;
using PolyMatrixd = PolyMatrix<double>;

}  // namespace framopt
