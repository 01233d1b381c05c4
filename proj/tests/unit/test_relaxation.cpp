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

#include "../support/instances.hpp"
#include "framopt/certify.hpp"
#include "framopt/relaxation.hpp"
#include "framopt/sdp.hpp"

using namespace framopt;
using framopt::testing::bundled;

namespace {

constexpr Method kMethods[] = {Method::dense, Method::tsp_max, Method::tsp_min, Method::nmt, Method::nmt_tsp};

double min_eig(const Eigen::MatrixXd& m) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

}  // namespace

TEST_CASE("method names round-trip") {
  for (Method m : kMethods) CHECK(parse_method(to_string(m)) == m);
  CHECK_FALSE(parse_method("sparse").has_value());
  CHECK(basis_kind(Method::nmt_tsp) == BasisKind::nmt);
  CHECK(chordal_kind(Method::tsp_max) == ChordalKind::maximal);
  CHECK(chordal_kind(Method::tsp_min) == ChordalKind::min_fill);
  CHECK_FALSE(uses_term_sparsity(Method::nmt));
}

TEST_CASE("dense nvar is the size of the doubled basis minus one") {
  for (const char* name : {"illustrative", "beam14"})
    for (Mode mode : {Mode::weight, Mode::compliance})
      for (int step : {0, 1}) {
        const auto p = bundled(name, mode);
        const int r = max_half_degree(p.pop) + step;
        const auto plan = plan_relaxation(p.pop, Method::dense, r);
        CHECK(plan.nvar == standard_basis_size(p.pop.n, 2 * r) - 1);
        if (plan.bytes < (std::size_t{1} << 28)) CHECK(assemble(p.pop, plan).sdp.nvar == plan.nvar);
      }
}

TEST_CASE("illustrative structure at the first order") {
  const auto p = bundled("illustrative", Mode::weight);
  const auto rel = assemble(p.pop, Method::dense, 1);
  CHECK(format_signature(signature(rel.sdp)) == "(3,1),(1,2),(1,4)");
  CHECK(rel.sdp.nvar == 9);
  CHECK(rel.sdp.objective_constant == doctest::Approx(3.0 / 8.0));
  CHECK(rel.index.monomial(0).is_constant());
  for (std::size_t i = 1; i + 1 < rel.index.size(); ++i)
    CHECK(grlex_compare(rel.index.monomial(static_cast<int>(i)), rel.index.monomial(static_cast<int>(i + 1))) < 0);
}

TEST_CASE("planned and assembled structure agree") {
  for (Method m : kMethods)
    for (int r : {1, 2, 3}) {
      const auto p = bundled("illustrative", Mode::compliance);
      const auto plan = plan_relaxation(p.pop, m, r, 1);
      const auto rel = assemble(p.pop, plan);
      CHECK(signature(rel.sdp) == plan.signature);
      CHECK(rel.sdp.nvar == plan.nvar);
    }
}

TEST_CASE("moment matrix entries are moments of basis products") {
  MomentIndex index(2);
  const Basis b = standard_basis(2, 1);
  const SdpBlock blk = moment_matrix(b.monomials(), index);
  CHECK(blk.size == 3);
  Eigen::Vector2d x(0.3, -0.7);
  const Eigen::VectorXd y = dirac_moments(index, x);
  const Eigen::MatrixXd m = evaluate(blk, y);
  Eigen::Vector3d v(1.0, x[0], x[1]);
  CHECK((m - v * v.transpose()).norm() <= 1e-14);
}

TEST_CASE("localizing matrix of a scalar constraint") {
  MomentIndex index(1);
  Polynomiald g = Polynomiald::constant(1, 1.0);
  g.add_term(Monomial({2}), -1.0);
  const Basis b = standard_basis(1, 1);
  const SdpBlock blk = localizing_matrix(PolyMatrixd::from_polynomial(g), b.monomials(), index);
  const double x = 0.4;
  const Eigen::MatrixXd m = evaluate(blk, dirac_moments(index, Eigen::VectorXd::Constant(1, x)));
  Eigen::Vector2d v(1.0, x);
  CHECK((m - (1 - x * x) * v * v.transpose()).norm() <= 1e-14);
}

TEST_CASE("Dirac moments of feasible designs satisfy every relaxation") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto p = bundled("illustrative", Mode::weight);
  for (Method m : kMethods)
    for (int r : {1, 2, 3})
      for (int k : {1, 2}) {
        const auto rel = assemble(p.pop, m, r, k);
        for (int t = 0; t < 5; ++t) {
          Eigen::VectorXd x(p.pop.n);
          do {
            for (auto& v : x) v = u(rng);
          } while (compliance_of(p.coeffs, p.coeffs.load, descale(p.pop, x)) > p.pop.cbar);
          const Eigen::VectorXd y = dirac_moments(rel.index, x);
          for (const auto& blk : rel.sdp.blocks) CHECK(min_eig(evaluate(blk, y)) >= -1e-8);
          CHECK(evaluate_objective(rel.sdp, y) == doctest::Approx(evaluate(p.pop.objective, x)).epsilon(1e-12));
        }
      }
}

TEST_CASE("assembly is deterministic") {
  const auto p = bundled("illustrative", Mode::compliance);
  for (Method m : kMethods) {
    const auto a = to_sdpa(assemble(p.pop, m, 2, 2).sdp);
    const auto b = to_sdpa(assemble(p.pop, m, 2, 2).sdp);
    CHECK(a == b);
  }
}

TEST_CASE("memory cap refuses large relaxations") {
  const auto p = bundled("frame21", Mode::compliance);
  CHECK_THROWS_AS(assemble(p.pop, Method::dense, 2, 1, std::size_t{1} << 20), MemoryCapError);
  try {
    assemble(p.pop, Method::dense, 2, 1, std::size_t{1} << 20);
  } catch (const MemoryCapError& ex) {
    CHECK(ex.estimate > ex.cap);
    CHECK(std::string(ex.what()).find("FRAMOPT_MEMCAP") != std::string::npos);
  }
  CHECK(parse_byte_size("2G") == (std::size_t{2} << 30));
  CHECK(parse_byte_size("512M") == (std::size_t{512} << 20));
  CHECK(parse_byte_size("1000") == 1000u);
  CHECK_FALSE(parse_byte_size("lots").has_value());
}

TEST_CASE("sparse bounds never exceed dense ones") {
  const auto p = bundled("illustrative", Mode::weight);
  for (int r : {1, 2}) {
    const double dense = solve(assemble(p.pop, Method::dense, r).sdp).objective;
    for (Method m : {Method::tsp_max, Method::tsp_min, Method::nmt, Method::nmt_tsp})
      for (int k : {1, 2}) CHECK(solve(assemble(p.pop, m, r, k).sdp).objective <= dense + 1e-6);
  }
}

TEST_CASE("lower bound ladder on the illustrative problem") {
  const auto p = bundled("illustrative", Mode::weight);
  const int orders[] = {1, 2};
  const int ks[] = {1, 2, 3};
  const auto ladder =
      lower_bound_ladder(p.pop, orders, Method::tsp_min, ks, [](const SdpProblem& sdp) { return solve(sdp); });
  CHECK(ladder.violations.empty());
  CHECK(ladder.cells.size() == 8);
  for (const auto& c : ladder.cells) CHECK(c.bound.has_value());
}

TEST_CASE("published structures beyond the acceptance set") {
  struct Case {
    const char* model;
    Mode mode;
    std::optional<double> bound;
    Method method;
    int r, k;
    const char* signature;
    std::size_t nvar;
  };
  const Case cases[] = {
      {"beam14", Mode::weight, std::nullopt, Method::nmt, 5, 1, "(14,57),(1,71),(1,860)", 19887},
      {"beam14", Mode::compliance, std::nullopt, Method::nmt_tsp, 3, 1, "(35,2),(252,3),(15,40)", 1307},
      {"beam14", Mode::compliance, std::nullopt, Method::nmt_tsp, 3, 2, "(1,3),(16,31),(14,32),(1,320)", 6264},
      {"modular24", Mode::weight, std::nullopt, Method::nmt, 5, 1, "(9,37),(1,46),(1,1369)", 6270},
      {"modular24", Mode::compliance, 0.118, Method::nmt, 3, 1, "(11,21),(1,31),(1,777)", 1605},
      {"modular24", Mode::weight, std::nullopt, Method::dense, 3, 1, "(9,55),(1,220),(1,2035)", 5004},
  };
  for (const auto& c : cases) {
    CAPTURE(c.signature);
    const auto model = load_model(resolve_model_path(c.model));
    const auto coeffs = assemble(model);
    const auto pop = build_pop(model, coeffs, c.mode, resolve_bounds(model, coeffs, c.mode, c.bound));
    const auto plan = plan_relaxation(pop, c.method, c.r, c.k);
    CHECK(format_signature(plan.signature) == c.signature);
    CHECK(plan.nvar == c.nvar);
  }
}
