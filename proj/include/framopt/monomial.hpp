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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace framopt {

using Exponent = std::uint8_t;

// Dense exponent vector x^alpha over n variables.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(int n) : exps_(static_cast<std::size_t>(n), 0) {}
  explicit Monomial(std::vector<Exponent> exps);
  Monomial(std::initializer_list<int> exps);

  static Monomial one(int n) { return Monomial(n); }
  static Monomial variable(int n, int i, int power = 1);

  int n() const { return static_cast<int>(exps_.size()); }
  int degree() const { return degree_; }
  Exponent operator[](int i) const { return exps_[static_cast<std::size_t>(i)]; }
  std::span<const Exponent> exponents() const { return exps_; }
  bool is_constant() const { return degree_ == 0; }

  friend bool operator==(const Monomial& a, const Monomial& b) {
    return a.exps_ == b.exps_;
  }

 private:
  std::vector<Exponent> exps_;
  int degree_ = 0;
};

// Exponent addition; throws std::overflow_error past the Exponent range.
Monomial operator*(const Monomial& a, const Monomial& b);
Monomial multiply(const Monomial& a, const Monomial& b);
Monomial square(const Monomial& m);

// Exponents mod 2.
std::vector<int> sign_type(const Monomial& m);
// Number of variables with a nonzero exponent.
int length(const Monomial& m);
bool is_even(const Monomial& m);

// Graded lexicographic order with x1 > x2 > ..., constant first.
std::strong_ordering grlex_compare(const Monomial& a, const Monomial& b);

struct GrlexLess {
  bool operator()(const Monomial& a, const Monomial& b) const {
    return grlex_compare(a, b) < 0;
  }
};

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const noexcept;
};

std::string to_string(const Monomial& m);

// Ordered, duplicate-free monomial list with a reverse index.
class Basis {
 public:
  Basis() = default;
  // Sorts into grlex order and removes duplicates.
  Basis(int n, std::vector<Monomial> monomials);

  int n() const { return n_; }
  std::size_t size() const { return monomials_.size(); }
  const Monomial& operator[](std::size_t i) const { return monomials_[i]; }
  std::optional<int> index_of(const Monomial& m) const;
  bool contains(const Monomial& m) const { return index_.contains(m); }
  auto begin() const { return monomials_.begin(); }
  auto end() const { return monomials_.end(); }
  const std::vector<Monomial>& monomials() const { return monomials_; }

  // Members of degree <= max_degree, order preserved.
  Basis truncated(int max_degree) const;

 private:
  int n_ = 0;
  std::vector<Monomial> monomials_;
  std::unordered_map<Monomial, int, MonomialHash> index_;
};

// C(n+d, n); throws std::overflow_error instead of wrapping.
std::uint64_t standard_basis_size(int n, int d);

Basis standard_basis(int n, int d);
Basis nmt_basis(int n, int r);

enum class BasisKind { standard, nmt };

// Active basis of the given kind truncated to degree d (standard b_d or
// nmt b_d, the latter empty-safe for d = 0).
Basis make_basis(BasisKind kind, int n, int d);

}  // namespace framopt
