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

#include "framopt/pop.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace framopt {

std::string to_string(Mode mode) { return mode == Mode::compliance ? "compliance" : "weight"; }

std::optional<Mode> parse_mode(const std::string& name) {
  if (name == "compliance") return Mode::compliance;
  if (name == "weight") return Mode::weight;
  return std::nullopt;
}

namespace {

double uniform_compliance(const StiffnessCoeffs<double>& coeffs, double area) {
  const auto ne = static_cast<Eigen::Index>(coeffs.element.size());
  return compliance_of(coeffs, coeffs.load, Eigen::VectorXd::Constant(ne, area));
}

bool psd_within(const Eigen::MatrixXd& m, double rel) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
  const double norm = std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
  return eig.eigenvalues().minCoeff() >= -rel * norm;
}

}  // namespace

double compute_cbar(const FrameModel& model, const StiffnessCoeffs<double>& coeffs, double wbar) {
  if (!(wbar > 0.0)) throw BoundError("weight bound must be positive");
  const double area = wbar / weight_factors(model).sum();
  const double c = uniform_compliance(coeffs, area);
  if (!std::isfinite(c))
    throw BoundError("uniform design cannot carry the load; supply a feasible design or an explicit bound");
  return c;
}

double compute_wbar(const FrameModel& model, const StiffnessCoeffs<double>& coeffs, double cbar) {
  if (!(cbar > 0.0)) throw BoundError("compliance bound must be positive");
  constexpr double kCap = 1e9;
  auto feasible = [&](double a) { return uniform_compliance(coeffs, a) <= cbar; };
  double hi = 1.0;
  while (!feasible(hi)) {
    hi *= 2.0;
    if (hi > kCap) throw BoundError("no uniform design below the area cap 1e9 meets the compliance bound");
  }
  double lo = hi / 2.0;
  while (feasible(lo)) {
    hi = lo;
    lo /= 2.0;
    if (lo < 1e-300) throw BoundError("compliance bound is met by vanishing areas");
  }
  while ((hi - lo) > 1e-10 * hi) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? hi : lo) = mid;
  }
  if (model.area_cap && hi > *model.area_cap)
    throw BoundError("the lightest feasible uniform design exceeds the area cap");
  return hi * weight_factors(model).sum();
}

Bounds resolve_bounds(const FrameModel& model, const StiffnessCoeffs<double>& coeffs, Mode mode,
                      std::optional<double> bound) {
  Bounds b;
  if (mode == Mode::compliance) {
    if (bound) b.wbar = *bound;
    else if (model.wbar) b.wbar = *model.wbar;
    else if (model.cbar) b.wbar = compute_wbar(model, coeffs, *model.cbar);
    else throw BoundError("no weight bound given and the model carries no reference bounds");
    b.cbar = compute_cbar(model, coeffs, b.wbar);
  } else {
    if (bound) b.cbar = *bound;
    else if (model.cbar) b.cbar = *model.cbar;
    else if (model.wbar) b.cbar = compute_cbar(model, coeffs, *model.wbar);
    else throw BoundError("no compliance bound given and the model carries no reference bounds");
    b.wbar = compute_wbar(model, coeffs, b.cbar);
  }
  return b;
}

ScaledPop build_pop(const FrameModel& model, const StiffnessCoeffs<double>& coeffs, Mode mode, double bound) {
  Bounds b;
  if (mode == Mode::compliance) {
    b.wbar = bound;
    b.cbar = compute_cbar(model, coeffs, bound);
  } else {
    b.cbar = bound;
    b.wbar = compute_wbar(model, coeffs, bound);
  }
  return build_pop(model, coeffs, mode, b);
}

ScaledPop build_pop(const FrameModel& model, const StiffnessCoeffs<double>& coeffs, Mode mode, const Bounds& bounds) {
  if (!(bounds.wbar > 0.0) || !(bounds.cbar > 0.0)) throw BoundError("bounds must be positive");
  ScaledPop pop;
  pop.mode = mode;
  pop.wbar = bounds.wbar;
  pop.cbar = bounds.cbar;
  pop.group_of_element = group_map(model);
  pop.groups = group_count(model);
  const int ng = pop.groups;
  pop.n = ng + (mode == Mode::compliance ? 1 : 0);
  pop.compliance_var = mode == Mode::compliance ? ng : -1;
  const int n = pop.n;
  const int dofs = coeffs.dofs;

  const Eigen::VectorXd rho_l = weight_factors(model);
  std::vector<double> group_factor(static_cast<std::size_t>(ng), 0.0);
  for (std::size_t e = 0; e < pop.group_of_element.size(); ++e)
    group_factor[static_cast<std::size_t>(pop.group_of_element[e])] += rho_l[static_cast<Eigen::Index>(e)];

  pop.upper_area.resize(static_cast<std::size_t>(ng));
  for (int g = 0; g < ng; ++g) {
    double ub = bounds.wbar / group_factor[static_cast<std::size_t>(g)];
    if (model.area_cap) ub = std::min(ub, *model.area_cap);
    pop.upper_area[static_cast<std::size_t>(g)] = ub;
    pop.descale.push_back({0.5 * ub, 0.5 * ub});
  }
  if (mode == Mode::compliance) pop.descale.push_back({0.5 * bounds.cbar, 0.5 * bounds.cbar});

  // Group weight at x_g = 1, relative to wbar.
  std::vector<double> share(static_cast<std::size_t>(ng));
  for (int g = 0; g < ng; ++g)
    share[static_cast<std::size_t>(g)] =
        pop.upper_area[static_cast<std::size_t>(g)] * group_factor[static_cast<std::size_t>(g)] / bounds.wbar;

  const Monomial one = Monomial::one(n);
  auto var = [&](int i) { return Monomial::variable(n, i); };

  // Objective.
  pop.objective = Polynomiald(n);
  if (mode == Mode::weight) {
    for (int g = 0; g < ng; ++g) {
      const double w = 0.5 * bounds.wbar * share[static_cast<std::size_t>(g)];
      pop.objective.add_term(one, w);
      pop.objective.add_term(var(g), w);
    }
  } else {
    pop.objective.add_term(one, 0.5 * bounds.cbar);
    pop.objective.add_term(var(pop.compliance_var), 0.5 * bounds.cbar);
  }

  // Stiffness coefficients per monomial: constant plus x_g^p, p = 1..3.
  static constexpr std::array<std::array<double, 4>, 4> binom = {{{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}}};
  Eigen::MatrixXd constant = coeffs.k0;
  std::vector<std::array<Eigen::MatrixXd, 4>> by_power(static_cast<std::size_t>(ng));
  for (auto& powers : by_power)
    for (auto& m : powers) m = Eigen::MatrixXd::Zero(dofs, dofs);
  for (std::size_t e = 0; e < coeffs.element.size(); ++e) {
    const int g = pop.group_of_element[e];
    const double h = 0.5 * pop.upper_area[static_cast<std::size_t>(g)];
    double hp = h;
    for (int i = 1; i <= 3; ++i, hp *= h) {
      const auto& ke = coeffs.element[e][static_cast<std::size_t>(i - 1)];
      if (ke.nonZeros() == 0) continue;
      const Eigen::MatrixXd dense = hp * Eigen::MatrixXd(ke);
      constant += dense;
      for (int p = 1; p <= i; ++p)
        by_power[static_cast<std::size_t>(g)][static_cast<std::size_t>(p)] +=
            binom[static_cast<std::size_t>(i)][static_cast<std::size_t>(p)] * dense;
    }
  }

  PolyMatrixd pmi(n, dofs + 1);
  {
    Eigen::MatrixXd c0 = Eigen::MatrixXd::Zero(dofs + 1, dofs + 1);
    c0(0, 0) = mode == Mode::weight ? bounds.cbar : 0.5 * bounds.cbar;
    c0.block(1, 0, dofs, 1) = -coeffs.load;
    c0.block(0, 1, 1, dofs) = -coeffs.load.transpose();
    c0.block(1, 1, dofs, dofs) = constant;
    pmi.add_term(one, c0);
    if (mode == Mode::compliance) pmi.add_entry(var(pop.compliance_var), 0, 0, 0.5 * bounds.cbar);
    for (int g = 0; g < ng; ++g) {
      for (int p = 1; p <= 3; ++p) {
        const auto& m = by_power[static_cast<std::size_t>(g)][static_cast<std::size_t>(p)];
        if (m.cwiseAbs().maxCoeff() == 0.0) continue;
        Eigen::MatrixXd blk = Eigen::MatrixXd::Zero(dofs + 1, dofs + 1);
        blk.block(1, 1, dofs, dofs) = m;
        pmi.add_term(Monomial::variable(n, g, p), blk);
      }
    }
  }
  pop.constraints.push_back(std::move(pmi));
  pop.constraint_names.push_back("pmi");

  if (mode == Mode::compliance) {
    Polynomiald resource(n);
    double c = 2.0;
    for (int g = 0; g < ng; ++g) {
      c -= share[static_cast<std::size_t>(g)];
      resource.add_term(var(g), -share[static_cast<std::size_t>(g)]);
    }
    resource.add_term(one, c);
    pop.constraints.push_back(PolyMatrixd::from_polynomial(resource));
    pop.constraint_names.push_back("resource");
  }

  auto box = [&](int i) {
    Polynomiald p(n);
    p.add_term(one, 1.0);
    p.add_term(Monomial::variable(n, i, 2), -1.0);
    return PolyMatrixd::from_polynomial(p);
  };
  for (int g = 0; g < ng; ++g) {
    pop.constraints.push_back(box(g));
    pop.constraint_names.push_back("box x" + std::to_string(g + 1));
  }
  if (mode == Mode::compliance && model.bound_compliance_variable) {
    pop.constraints.push_back(box(pop.compliance_var));
    pop.constraint_names.push_back("box c");
  }

  // Reference design: the uniform design behind the bounds.
  const double uniform = bounds.wbar / rho_l.sum();
  pop.reference_point.resize(n);
  for (int g = 0; g < ng; ++g)
    pop.reference_point[g] = pop.descale[static_cast<std::size_t>(g)].inverse(uniform);
  if (mode == Mode::compliance) {
    const double c = uniform_compliance(coeffs, uniform);
    pop.reference_point[pop.compliance_var] = pop.descale.back().inverse(c);
  }
  for (std::size_t j = 0; j < pop.constraints.size(); ++j) {
    const auto x = pop.reference_point;
    const bool in_box = (x.array() <= 1.0 + 1e-9).all() && (x.array() >= -1.0 - 1e-9).all();
    if (!in_box || !psd_within(evaluate(pop.constraints[j], x), 1e-8)) {
      std::ostringstream os;
      os << "reference uniform design violates constraint '" << pop.constraint_names[j]
         << "'; bounds are inconsistent with the model";
      throw BoundError(os.str());
    }
  }
  return pop;
}

Eigen::VectorXd descale(const ScaledPop& pop, const Eigen::VectorXd& first_order) {
  if (first_order.size() < pop.groups) throw std::invalid_argument("too few first-order moments");
  Eigen::VectorXd a(static_cast<Eigen::Index>(pop.group_of_element.size()));
  for (std::size_t e = 0; e < pop.group_of_element.size(); ++e) {
    const int g = pop.group_of_element[e];
    const double y = std::clamp(first_order[g], -1.0, 1.0);
    a[static_cast<Eigen::Index>(e)] = pop.descale[static_cast<std::size_t>(g)](y);
  }
  return a;
}

Eigen::VectorXd scale(const ScaledPop& pop, const Eigen::VectorXd& areas) {
  Eigen::VectorXd x = Eigen::VectorXd::Constant(pop.groups, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t e = 0; e < pop.group_of_element.size(); ++e) {
    const int g = pop.group_of_element[e];
    const double v = pop.descale[static_cast<std::size_t>(g)].inverse(areas[static_cast<Eigen::Index>(e)]);
    if (std::isnan(x[g])) x[g] = v;
    else if (std::abs(x[g] - v) > 1e-9 * (1.0 + std::abs(v)))
      throw std::invalid_argument("design differs within a link group");
  }
  return x;
}

double descale_compliance(const ScaledPop& pop, double scaled) {
  if (pop.compliance_var < 0) throw std::logic_error("weight-mode problem has no compliance variable");
  return pop.descale[static_cast<std::size_t>(pop.compliance_var)](std::clamp(scaled, -1.0, 1.0));
}

}  // namespace framopt
