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

#include <doctest.h>

#include <random>

#include "framopt/model_io.hpp"
#include "framopt/pop.hpp"

using namespace framopt;

namespace {

struct Loaded {
  FrameModel model;
  StiffnessCoeffs<double> coeffs;
  ScaledPop pop;
};

Loaded load(const std::string& name, Mode mode) {
  Loaded l;
  l.model = load_model(resolve_model_path(name));
  l.coeffs = assemble(l.model);
  l.pop = build_pop(l.model, l.coeffs, mode, resolve_bounds(l.model, l.coeffs, mode, std::nullopt));
  return l;
}

double min_eig(const Eigen::MatrixXd& m) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

}  // namespace

TEST_CASE("illustrative weight problem in scaled variables") {
  const auto l = load("illustrative", Mode::weight);
  const auto& p = l.pop;
  REQUIRE(p.n == 3);
  CHECK(p.cbar == doctest::Approx(37.5));
  CHECK(p.objective.coefficient(Monomial::one(3)) == doctest::Approx(3.0 / 8.0));
  for (int i = 0; i < 3; ++i) CHECK(p.objective.coefficient(Monomial::variable(3, i)) == doctest::Approx(1.0 / 8.0));

  // K(x) = 5/48 + (x1 + x2 + 8 x3)/48 + (x1^2 + x2^2 + 8 x3^2)/96
  const auto& g = p.constraints[0];
  REQUIRE(g.size() == 2);
  CHECK(g.coefficient(Monomial::one(3))(0, 0) == doctest::Approx(37.5));
  CHECK(g.coefficient(Monomial::one(3))(0, 1) == doctest::Approx(-1.0));
  CHECK(g.coefficient(Monomial::one(3))(1, 1) == doctest::Approx(5.0 / 48.0));
  const double lin[3] = {1.0 / 48, 1.0 / 48, 8.0 / 48};
  const double quad[3] = {1.0 / 96, 1.0 / 96, 8.0 / 96};
  for (int i = 0; i < 3; ++i) {
    CHECK(g.coefficient(Monomial::variable(3, i))(1, 1) == doctest::Approx(lin[i]));
    CHECK(g.coefficient(Monomial::variable(3, i, 2))(1, 1) == doctest::Approx(quad[i]));
  }
  REQUIRE(p.constraints.size() == 4);
  for (int i = 0; i < 3; ++i) {
    const auto box = p.constraints[static_cast<std::size_t>(i + 1)].entry(0, 0);
    CHECK(box.coefficient(Monomial::one(3)) == 1.0);
    CHECK(box.coefficient(Monomial::variable(3, i, 2)) == -1.0);
  }
}

TEST_CASE("descale and scale are inverse on the box") {
  std::mt19937_64 rng(3);
  for (const char* name : {"illustrative", "frame21", "modular24"}) {
    const auto l = load(name, Mode::compliance);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int t = 0; t < 20; ++t) {
      Eigen::VectorXd x(l.pop.groups);
      for (auto& v : x) v = u(rng);
      const Eigen::VectorXd a = descale(l.pop, x);
      CHECK((descale(l.pop, scale(l.pop, a)) - a).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK((scale(l.pop, a) - x).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("descale clamps slightly infeasible moments") {
  const auto l = load("illustrative", Mode::weight);
  const Eigen::VectorXd a = descale(l.pop, Eigen::Vector3d(-1.0 - 1e-9, 1.0 + 1e-9, 0.0));
  CHECK(a[0] == 0.0);
  CHECK(a[1] == doctest::Approx(l.pop.upper_area[1]));
}

TEST_CASE("reference design satisfies the PMI") {
  for (const char* name : {"illustrative", "frame21", "beam14", "modular24", "cantilever39"})
    for (Mode mode : {Mode::weight, Mode::compliance}) {
      CAPTURE(name);
      const auto l = load(name, mode);
      const Eigen::MatrixXd g = evaluate(l.pop.constraints[0], l.pop.reference_point);
      CHECK(min_eig(g) >= -1e-8 * g.norm());
    }
}

TEST_CASE("weight objective spans zero to the full box") {
  for (const char* name : {"illustrative", "frame21", "modular24"}) {
    const auto l = load(name, Mode::weight);
    const auto n = static_cast<Eigen::Index>(l.pop.n);
    CHECK(evaluate(l.pop.objective, Eigen::VectorXd::Constant(n, -1.0)) == doctest::Approx(0.0).epsilon(1e-12));
    const Eigen::VectorXd full = descale(l.pop, Eigen::VectorXd::Constant(n, 1.0));
    CHECK(evaluate(l.pop.objective, Eigen::VectorXd::Constant(n, 1.0)) ==
          doctest::Approx(weight_of(l.model, full)).epsilon(1e-12));
  }
}

TEST_CASE("objective matches weight at every design") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto l = load("modular24", Mode::weight);
  for (int t = 0; t < 20; ++t) {
    Eigen::VectorXd x(l.pop.n);
    for (auto& v : x) v = u(rng);
    CHECK(evaluate(l.pop.objective, x) == doctest::Approx(weight_of(l.model, descale(l.pop, x))).epsilon(1e-12));
  }
}

TEST_CASE("PMI holds exactly when compliance meets the bound") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const char* name : {"illustrative", "frame21"}) {
    const auto l = load(name, Mode::weight);
    int inside = 0, outside = 0;
    for (int t = 0; t < 200; ++t) {
      Eigen::VectorXd x(l.pop.n);
      for (auto& v : x) v = u(rng);
      // Every other sample is a thin design, so both sides of the bound show up.
      if (t % 2) x = (x.array() + 1.0) * 0.01 - 1.0;
      const double c = compliance_of(l.coeffs, l.coeffs.load, descale(l.pop, x));
      // Skip the thin shell where rounding decides.
      if (std::abs(c - l.pop.cbar) < 1e-6 * l.pop.cbar) continue;
      const Eigen::MatrixXd g = evaluate(l.pop.constraints[0], x);
      const bool psd = min_eig(g) >= -1e-10 * g.norm();
      CHECK(psd == (c <= l.pop.cbar));
      (c <= l.pop.cbar ? inside : outside)++;
    }
    CHECK(inside > 0);
    CHECK(outside > 0);
  }
}

TEST_CASE("problem data are separable") {
  for (const char* name : {"illustrative", "frame21", "beam14", "modular24"})
    for (Mode mode : {Mode::weight, Mode::compliance}) {
      const auto l = load(name, mode);
      for (const auto& [m, c] : l.pop.objective.terms()) CHECK(length(m) <= 1);
      for (const auto& g : l.pop.constraints)
        for (const auto& [m, b] : g.terms()) CHECK(length(m) <= 1);
    }
}

TEST_CASE("derived bounds are mutually consistent") {
  const auto model = load_model(resolve_model_path("frame21"));
  const auto coeffs = assemble(model);
  const double wbar = 2.0;
  const double cbar = compute_cbar(model, coeffs, wbar);
  CHECK(compute_wbar(model, coeffs, cbar) == doctest::Approx(wbar).epsilon(1e-8));
  CHECK_THROWS_AS(build_pop(model, coeffs, Mode::weight, Bounds{0.0, 1.0}), BoundError);
}

TEST_CASE("linked groups share one variable") {
  const auto l = load("modular24", Mode::weight);
  CHECK(l.pop.groups < static_cast<int>(l.model.elements.size()));
  const Eigen::VectorXd a = descale(l.pop, Eigen::VectorXd::Constant(l.pop.n, 0.3));
  for (const auto& group : l.model.groups)
    for (int e : group) CHECK(a[e] == a[group.front()]);
}
