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

#include "framopt/monomial.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace framopt {

namespace {

int sum_of(const std::vector<Exponent>& e) {
  return std::accumulate(e.begin(), e.end(), 0);
}

}  // namespace

Monomial::Monomial(std::vector<Exponent> exps)
    : exps_(std::move(exps)), degree_(sum_of(exps_)) {}

Monomial::Monomial(std::initializer_list<int> exps) {
  exps_.reserve(exps.size());
  for (int e : exps) {
    if (e < 0 || e > std::numeric_limits<Exponent>::max())
      throw std::invalid_argument("exponent out of range");
    exps_.push_back(static_cast<Exponent>(e));
  }
  degree_ = sum_of(exps_);
}

Monomial Monomial::variable(int n, int i, int power) {
  if (i < 0 || i >= n) throw std::out_of_range("variable index out of range");
  if (power < 0 || power > std::numeric_limits<Exponent>::max())
    throw std::invalid_argument("exponent out of range");
  std::vector<Exponent> e(static_cast<std::size_t>(n), 0);
  e[static_cast<std::size_t>(i)] = static_cast<Exponent>(power);
  return Monomial(std::move(e));
}

Monomial operator*(const Monomial& a, const Monomial& b) {
  if (a.n() != b.n()) throw std::invalid_argument("monomial variable count mismatch");
  std::vector<Exponent> e(static_cast<std::size_t>(a.n()));
  for (int i = 0; i < a.n(); ++i) {
    int s = a[i] + b[i];
    if (s > std::numeric_limits<Exponent>::max())
      throw std::overflow_error("monomial exponent overflow");
    e[static_cast<std::size_t>(i)] = static_cast<Exponent>(s);
  }
  return Monomial(std::move(e));
}

Monomial multiply(const Monomial& a, const Monomial& b) { return a * b; }

Monomial square(const Monomial& m) { return m * m; }

std::vector<int> sign_type(const Monomial& m) {
  std::vector<int> s(static_cast<std::size_t>(m.n()));
  for (int i = 0; i < m.n(); ++i) s[static_cast<std::size_t>(i)] = m[i] % 2;
  return s;
}

int length(const Monomial& m) {
  auto e = m.exponents();
  return static_cast<int>(std::count_if(e.begin(), e.end(), [](Exponent x) { return x != 0; }));
}

bool is_even(const Monomial& m) {
  auto e = m.exponents();
  return std::all_of(e.begin(), e.end(), [](Exponent x) { return x % 2 == 0; });
}

std::strong_ordering grlex_compare(const Monomial& a, const Monomial& b) {
  if (a.degree() != b.degree()) return a.degree() <=> b.degree();
  // Same degree: a larger leading exponent comes first.
  for (int i = 0; i < std::min(a.n(), b.n()); ++i) {
    if (a[i] != b[i]) return b[i] <=> a[i];
  }
  return a.n() <=> b.n();
}

std::size_t MonomialHash::operator()(const Monomial& m) const noexcept {
  // FNV-1a over the exponent bytes.
  std::size_t h = 1469598103934665603ull;
  for (Exponent e : m.exponents()) {
    h ^= e;
    h *= 1099511628211ull;
  }
  return h;
}

std::string to_string(const Monomial& m) {
  if (m.is_constant()) return "1";
  std::string s;
  for (int i = 0; i < m.n(); ++i) {
    if (m[i] == 0) continue;
    if (!s.empty()) s += '*';
    s += "x" + std::to_string(i + 1);
    if (m[i] > 1) s += "^" + std::to_string(m[i]);
  }
  return s;
}

Basis::Basis(int n, std::vector<Monomial> monomials) : n_(n), monomials_(std::move(monomials)) {
  std::sort(monomials_.begin(), monomials_.end(), GrlexLess{});
  monomials_.erase(std::unique(monomials_.begin(), monomials_.end()), monomials_.end());
  index_.reserve(monomials_.size());
  for (std::size_t i = 0; i < monomials_.size(); ++i) {
    if (monomials_[i].n() != n) throw std::invalid_argument("basis monomial variable count mismatch");
    index_.emplace(monomials_[i], static_cast<int>(i));
  }
}

std::optional<int> Basis::index_of(const Monomial& m) const {
  auto it = index_.find(m);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Basis Basis::truncated(int max_degree) const {
  std::vector<Monomial> kept;
  for (const auto& m : monomials_)
    if (m.degree() <= max_degree) kept.push_back(m);
  return Basis(n_, std::move(kept));
}

std::uint64_t standard_basis_size(int n, int d) {
  if (n < 0 || d < 0) throw std::invalid_argument("negative basis parameters");
  // C(n+d, k) with k = min(n, d), built incrementally; each partial product
  // is itself a binomial so the division is exact.
  const int k = std::min(n, d);
  std::uint64_t c = 1;
  for (int i = 1; i <= k; ++i) {
    const std::uint64_t top = static_cast<std::uint64_t>(n + d - k + i);
    if (c > std::numeric_limits<std::uint64_t>::max() / top)
      throw std::overflow_error("basis size overflows 64 bits");
    c = c * top / static_cast<std::uint64_t>(i);
  }
  return c;
}

Basis standard_basis(int n, int d) {
  if (n < 1 || d < 0) throw std::invalid_argument("standard_basis requires n >= 1, d >= 0");
  const std::uint64_t count = standard_basis_size(n, d);
  if (count > (std::uint64_t{1} << 31))
    throw std::overflow_error("standard basis too large to enumerate");
  std::vector<Monomial> out;
  out.reserve(static_cast<std::size_t>(count));
  std::vector<Exponent> e(static_cast<std::size_t>(n), 0);
  // Compositions of each degree in descending lexicographic order.
  for (int deg = 0; deg <= d; ++deg) {
    std::fill(e.begin(), e.end(), 0);
    e[0] = static_cast<Exponent>(deg);
    while (true) {
      out.emplace_back(e);
      // Next composition: move one unit from the rightmost movable slot.
      int i = n - 2;
      while (i >= 0 && e[static_cast<std::size_t>(i)] == 0) --i;
      if (i < 0) break;
      --e[static_cast<std::size_t>(i)];
      const int tail = 1 + e[static_cast<std::size_t>(n - 1)];
      e[static_cast<std::size_t>(n - 1)] = 0;
      e[static_cast<std::size_t>(i + 1)] = static_cast<Exponent>(tail);
    }
  }
  return Basis(n, std::move(out));
}

Basis nmt_basis(int n, int r) {
  if (n < 1 || r < 0) throw std::invalid_argument("nmt_basis requires n >= 1, r >= 0");
  std::vector<Monomial> out;
  out.reserve(static_cast<std::size_t>(n * r + 1));
  out.push_back(Monomial::one(n));
  for (int p = 1; p <= r; ++p)
    for (int i = 0; i < n; ++i) out.push_back(Monomial::variable(n, i, p));
  return Basis(n, std::move(out));
}

Basis make_basis(BasisKind kind, int n, int d) {
  return kind == BasisKind::standard ? standard_basis(n, d) : nmt_basis(n, d);
}

}  // namespace framopt
