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

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "../support/instances.hpp"
#include "framopt/sdp.hpp"

using namespace framopt;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Dense symmetric matrix -> upper-triangular entries for variable v.
void add_matrix(SdpBlock& blk, int var, const Eigen::MatrixXd& m) {
  for (int i = 0; i < m.rows(); ++i)
    for (int j = i; j < m.cols(); ++j)
      if (m(i, j) != 0.0) blk.entries.push_back({var, i, j, m(i, j)});
}

Eigen::MatrixXd random_symmetric(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = normal(rng);
  return (a + a.transpose()) / 2.0;
}

Eigen::MatrixXd random_pd(std::mt19937_64& rng, int n) {
  const Eigen::MatrixXd a = random_symmetric(rng, n);
  return a * a + Eigen::MatrixXd::Identity(n, n);
}

// Strictly feasible on both sides by construction: C = S0 - sum y0_i A_i
// with S0 > 0, and c_i = <A_i, X0> with X0 > 0.
struct RandomSdp {
  SdpProblem problem;
  std::vector<std::vector<Eigen::MatrixXd>> a;  // [block][var-1]
  std::vector<Eigen::MatrixXd> c;
  Eigen::VectorXd y0;
  Eigen::VectorXd cost;
};

RandomSdp random_sdp(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick_blocks(1, 3), pick_side(1, 10), pick_m(1, 12);
  std::normal_distribution<double> normal;
  RandomSdp r;
  const int m = pick_m(rng);
  const int nb = pick_blocks(rng);
  r.y0 = Eigen::VectorXd(m);
  for (auto& v : r.y0) v = normal(rng);
  r.cost = Eigen::VectorXd::Zero(m);
  r.problem.nvar = static_cast<std::size_t>(m);
  for (int b = 0; b < nb; ++b) {
    const int side = pick_side(rng);
    std::vector<Eigen::MatrixXd> ab;
    Eigen::MatrixXd s0 = random_pd(rng, side), x0 = random_pd(rng, side);
    Eigen::MatrixXd c = s0;
    for (int i = 0; i < m; ++i) {
      ab.push_back(random_symmetric(rng, side));
      c -= r.y0[i] * ab.back();
      r.cost[i] += (ab.back().cwiseProduct(x0)).sum();
    }
    SdpBlock blk;
    blk.size = side;
    add_matrix(blk, 0, c);
    for (int i = 0; i < m; ++i) add_matrix(blk, i + 1, ab[static_cast<std::size_t>(i)]);
    std::stable_sort(blk.entries.begin(), blk.entries.end(), [](const BlockEntry& x, const BlockEntry& y) {
      return std::tie(x.var, x.row, x.col) < std::tie(y.var, y.row, y.col);
    });
    r.problem.blocks.push_back(std::move(blk));
    r.a.push_back(std::move(ab));
    r.c.push_back(c);
  }
  for (int i = 0; i < m; ++i) r.problem.objective.emplace_back(i + 1, r.cost[i]);
  return r;
}

}  // namespace

TEST_CASE("one by one program") {
  SdpProblem p;
  p.nvar = 1;
  SdpBlock blk;
  blk.size = 1;
  blk.entries = {{0, 0, 0, -3.0}, {1, 0, 0, 1.0}};
  p.blocks.push_back(blk);
  p.objective = {{1, 1.0}};
  const auto sol = solve(p);
  CHECK(sol.status == SolveStatus::optimal);
  CHECK(sol.objective == doctest::Approx(3.0).epsilon(1e-7));
  CHECK(sol.y[1] == doctest::Approx(3.0).epsilon(1e-7));
}

TEST_CASE("random strictly feasible programs: certified lower bounds and complementarity") {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 50; ++t) {
    CAPTURE(t);
    const auto r = random_sdp(rng);
    const auto res = solve_detailed(r.problem);
    REQUIRE(res.solution.status == SolveStatus::optimal);
    const Eigen::VectorXd y = res.solution.y.tail(static_cast<Eigen::Index>(r.problem.nvar));
    // Feasible point y0 bounds the optimum from above.
    CHECK(res.solution.objective <= r.cost.dot(r.y0) + 1e-6 * (1 + std::abs(r.cost.dot(r.y0))));

    // Dual objective -<C, X> is a lower bound once A(X) = c holds.
    Eigen::VectorXd ax = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(r.problem.nvar));
    double dual = 0.0, xs = 0.0;
    std::size_t dense = 0;
    Eigen::Index diag = 0;
    for (std::size_t b = 0; b < r.problem.blocks.size(); ++b) {
      Eigen::MatrixXd x, s;
      if (r.problem.blocks[b].size > 1) {
        x = res.x[dense];
        s = res.s[dense];
        ++dense;
      } else {
        x = Eigen::MatrixXd::Constant(1, 1, res.x_diag[diag]);
        s = Eigen::MatrixXd::Constant(1, 1, res.s_diag[diag]);
        ++diag;
      }
      CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(x).eigenvalues().minCoeff() >= -1e-9 * (1 + x.norm()));
      dual -= r.c[b].cwiseProduct(x).sum();
      for (std::size_t i = 0; i < r.problem.nvar; ++i)
        ax[static_cast<Eigen::Index>(i)] += r.a[b][i].cwiseProduct(x).sum();
      xs += x.cwiseProduct(s).sum();
    }
    CHECK((ax - r.cost).norm() <= 1e-6 * (1 + r.cost.norm()));
    CHECK(dual <= res.solution.objective + 1e-6 * (1 + std::abs(dual)));
    CHECK(res.solution.objective - dual <= 1e-6 * (1 + std::abs(dual)));
    // Complementarity through <X, S>, which is the duality gap.
    CHECK(xs >= -1e-12);
    CHECK(xs <= 1e-6 * (1 + std::abs(dual)));
    CHECK(r.cost.dot(y) == doctest::Approx(res.solution.objective).epsilon(1e-9));
  }
}

TEST_CASE("illustrative relaxations through the embedded solver") {
  const auto p = framopt::testing::bundled("illustrative", Mode::weight);
  const auto r1 = assemble(p.pop, Method::dense, 1);
  const auto s1 = solve(r1.sdp);
  CHECK(s1.status == SolveStatus::optimal);
  CHECK(s1.objective == doctest::Approx(0.02).epsilon(1e-6));
  const auto first = first_order_moments(r1.index, s1.y, 3);
  CHECK(first[0] == doctest::Approx(-1.0).epsilon(1e-3));
  CHECK(first[1] == doctest::Approx(-1.0).epsilon(1e-3));
  CHECK(first[2] == doctest::Approx(-0.84).epsilon(1e-3));
  CHECK(solve(assemble(p.pop, Method::dense, 2).sdp).objective == doctest::Approx(std::sqrt(2.0) / 20).epsilon(1e-6));
}

TEST_CASE("solver configuration and memory cap") {
  SolverConfig cfg;
  cfg.tolerance = 0.0;
  CHECK_THROWS_AS(cfg.check(), std::invalid_argument);
  cfg.tolerance = 0.1;
  CHECK_THROWS_AS(cfg.check(), std::invalid_argument);
  cfg.tolerance = 1e-8;
  cfg.memory_cap = 1024;
  const auto p = framopt::testing::bundled("illustrative", Mode::weight);
  const auto rel = assemble(p.pop, Method::dense, 2);
  CHECK_THROWS_AS(solve(rel.sdp, cfg), MemoryCapError);
  try {
    solve(rel.sdp, cfg);
  } catch (const MemoryCapError& ex) {
    CHECK(std::string(ex.what()).find("SDPA") != std::string::npos);
  }
}

TEST_CASE("SDPA export is exact and re-parses to the same problem") {
  std::mt19937_64 rng(43);
  for (int t = 0; t < 20; ++t) {
    const auto r = random_sdp(rng);
    const std::string text = to_sdpa(r.problem);
    const SdpProblem back = parse_sdpa(text);
    CHECK(to_sdpa(back) == text);
    REQUIRE(back.blocks.size() == r.problem.blocks.size());
    // The layout moves 1x1 blocks behind the dense ones.
    std::vector<const SdpBlock*> expected;
    for (const auto& blk : r.problem.blocks)
      if (blk.size > 1) expected.push_back(&blk);
    for (const auto& blk : r.problem.blocks)
      if (blk.size == 1) expected.push_back(&blk);
    for (std::size_t b = 0; b < back.blocks.size(); ++b) {
      CHECK(back.blocks[b].size == expected[b]->size);
      CHECK(back.blocks[b].entries == expected[b]->entries);
    }
  }
}

TEST_CASE("SDPA layout puts merged 1x1 blocks last") {
  const auto p = framopt::testing::bundled("illustrative", Mode::weight);
  const std::string text = to_sdpa(assemble(p.pop, Method::dense, 1).sdp);
  std::istringstream in(text);
  std::string l1, l2, l3;
  std::getline(in, l1);
  std::getline(in, l2);
  std::getline(in, l3);
  CHECK(l1 == "9");
  CHECK(l2 == "3");
  CHECK(l3 == "4 2 -3");
  CHECK(text == slurp(std::filesystem::path(FRAMOPT_GOLDEN_DIR) / "illustrative_weight_dense_r1.dat-s"));
}

TEST_CASE("malformed SDPA input is rejected") {
  CHECK_THROWS_AS(parse_sdpa("1\n"), SdpaFormatError);
  CHECK_THROWS_AS(parse_sdpa("1\n1\n2\n1\n0 2 1 1 1\n"), SdpaFormatError);
  CHECK_THROWS_AS(parse_sdpa("1\n1\n2\n1\n0 1 3 1 1\n"), SdpaFormatError);
  CHECK_THROWS_AS(parse_sdpa("1\n1\n-2\n1\n0 1 1 2 1\n"), SdpaFormatError);
  CHECK_THROWS_AS(parse_sdpa("1\n1\n2\n1\n0 1 1 1 abc\n"), SdpaFormatError);
  // Comments and SDPA punctuation are tolerated.
  const auto p = parse_sdpa("\"a comment\n1\n1\n{2}\n1.0\n0 1 1 1 -1\n1 1 1 2 1\n");
  CHECK(p.blocks.size() == 1);
  CHECK(p.blocks[0].entries.front().value == 1.0);
}

TEST_CASE("solution files") {
  const auto p = framopt::testing::bundled("illustrative", Mode::weight);
  const auto rel = assemble(p.pop, Method::dense, 1);
  const auto sol = solve(rel.sdp);
  std::ostringstream plain;
  plain.precision(17);
  for (Eigen::Index i = 1; i < sol.y.size(); ++i) plain << sol.y[i] << "\n";
  const auto back = parse_solution_text(plain.str(), rel.sdp);
  CHECK(back.objective == doctest::Approx(sol.objective).epsilon(1e-12));
  CHECK(back.y[0] == 1.0);

  std::ostringstream sdpa;
  sdpa << "phase.value  = pdOPT\nobjValPrimal = 0.02\nxVec = \n{";
  for (Eigen::Index i = 1; i < sol.y.size(); ++i) sdpa << (i > 1 ? "," : "") << sol.y[i];
  sdpa << "}\nxMat = \n{}\n";
  const auto res = parse_solution_text(sdpa.str(), rel.sdp);
  CHECK(res.status == SolveStatus::optimal);
  CHECK(res.y.size() == sol.y.size());

  CHECK_THROWS_AS(parse_solution_text("1 2 3", rel.sdp), SdpaFormatError);
  CHECK_THROWS_AS(parse_solution_text("1 2 x 4 5 6 7 8 9", rel.sdp), SdpaFormatError);
}
