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

#include "framopt/certify.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <limits>

namespace framopt {

int numerical_rank(const Eigen::MatrixXd& m, double rel_tol) {
  if (m.size() == 0) return 0;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  const double cut = rel_tol * sv.maxCoeff();
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > cut) ++rank;
  return rank;
}

int max_half_degree(const ScaledPop& pop) {
  int d = 0;
  for (const auto& g : pop.constraints) d = std::max(d, half_degree(g));
  return d;
}

namespace {

Eigen::MatrixXd moment_values(const MomentIndex& index, const Eigen::VectorXd& y, const Basis& basis) {
  const auto q = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd m(q, q);
  for (Eigen::Index a = 0; a < q; ++a)
    for (Eigen::Index b = a; b < q; ++b) {
      const auto id = index.find(basis[static_cast<std::size_t>(a)] * basis[static_cast<std::size_t>(b)]);
      if (!id) throw std::invalid_argument("moment vector lacks a moment needed for the flatness check");
      m(a, b) = m(b, a) = y[*id];
    }
  return m;
}

}  // namespace

Flatness flatness_check(const MomentIndex& index, const Eigen::VectorXd& y, int r, int d, double rel_tol) {
  Flatness f;
  f.rank_r = numerical_rank(moment_values(index, y, standard_basis(index.n(), r)), rel_tol);
  f.rank_rd = numerical_rank(moment_values(index, y, standard_basis(index.n(), std::max(0, r - d))), rel_tol);
  f.holds = f.rank_r == f.rank_rd;
  return f;
}

std::optional<Flatness> flatness_check(const Relaxation& rel, const ScaledPop& pop, const Eigen::VectorXd& y,
                                       double rel_tol) {
  if (rel.plan.method != Method::dense) return std::nullopt;
  return flatness_check(rel.index, y, rel.plan.r, max_half_degree(pop), rel_tol);
}

CertificateReport compliance_upper_bound(const ScaledPop& pop, const StiffnessCoeffs<double>& coeffs,
                                         const Eigen::VectorXd& y_first, double lower) {
  if (pop.mode != Mode::compliance) throw std::invalid_argument("compliance certificate needs a compliance-mode problem");
  CertificateReport rep;
  rep.mode = Mode::compliance;
  rep.lower = lower;
  rep.design = descale(pop, y_first);
  const double c = compliance_of(coeffs, coeffs.load, rep.design);
  if (!std::isfinite(c)) {
    rep.note = "load is not in the range of the reconstructed stiffness; no upper bound";
    return rep;
  }
  rep.upper = c;
  rep.epsilon = c - 0.5 * (y_first[pop.compliance_var] + 1.0) * pop.cbar;
  if (lower > 0.0) rep.epsilon_rel = c / lower - 1.0;
  return rep;
}

double delta_star(const StiffnessCoeffs<double>& coeffs, const Eigen::VectorXd& base, double cbar) {
  auto feasible = [&](double delta) {
    const double c = compliance_of(coeffs, coeffs.load, delta * base);
    return std::isfinite(c) && c <= cbar;
  };
  if (feasible(1.0)) return 1.0;
  double lo = 1.0, hi = 2.0;
  while (!feasible(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e9) throw std::runtime_error("no scaling of the reconstructed design meets the compliance bound");
  }
  while ((hi - lo) > 1e-10 * hi) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? hi : lo) = mid;
  }
  return hi;
}

CertificateReport weight_delta_star(const FrameModel& model, const ScaledPop& pop,
                                    const StiffnessCoeffs<double>& coeffs, const Eigen::VectorXd& y_first, double lower) {
  if (pop.mode != Mode::weight) throw std::invalid_argument("delta certificate needs a weight-mode problem");
  CertificateReport rep;
  rep.mode = Mode::weight;
  rep.lower = lower;
  const Eigen::VectorXd base = descale(pop, y_first);
  rep.design = base;
  if (coeffs.k0.size() > 0 && !coeffs.k0.isZero(0.0) && (base.array() <= 0.0).any()) {
    rep.note = "stiffness has a constant part and some reconstructed areas vanish; delta scaling not applicable";
    return rep;
  }
  double delta = 0.0;
  try {
    delta = delta_star(coeffs, base, pop.cbar);
  } catch (const std::runtime_error& ex) {
    rep.note = ex.what();
    return rep;
  }
  const double w = weight_of(model, base);
  rep.delta_star = delta;
  rep.design = delta * base;
  rep.upper = delta * w;
  rep.epsilon = (delta - 1.0) * w;
  if (lower > 0.0) rep.epsilon_rel = *rep.upper / lower - 1.0;
  return rep;
}

}  // namespace framopt
