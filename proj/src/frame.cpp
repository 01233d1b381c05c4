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

#include "framopt/frame.hpp"

#include <algorithm>
#include <numbers>
#include <set>
#include <sstream>

namespace framopt {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ModelError(what);
}

double profile_eta2(double b, double h) {
  const double area = 2.0 * b + h - 2.0;
  const double inertia = (b * h * h * h - (b - 1.0) * std::pow(h - 2.0, 3)) / 12.0;
  return inertia / (area * area);
}

}  // namespace

SectionPreset make_section(std::string id, SectionKind kind, std::vector<double> params) {
  SectionPreset s{std::move(id), kind, std::move(params), 0.0, 0.0};
  const auto& p = s.params;
  auto need = [&](std::size_t count) {
    require(p.size() == count, "section '" + s.id + "' (" + to_string(kind) + ") expects " +
                                   std::to_string(count) + " parameter(s)");
  };
  using std::numbers::pi;
  switch (kind) {
    case SectionKind::rect_width:
      need(1);
      require(p[0] > 0.0, "section '" + s.id + "': width must be positive");
      s.eta3 = 1.0 / (12.0 * p[0] * p[0]);
      break;
    case SectionKind::rect_aspect:
      need(1);
      require(p[0] > 0.0, "section '" + s.id + "': aspect ratio must be positive");
      s.eta2 = p[0] / 12.0;
      break;
    case SectionKind::circular_hollow:
      need(1);
      require(p[0] >= 0.0 && p[0] < 1.0, "section '" + s.id + "': inner radius ratio must lie in [0, 1)");
      s.eta2 = (1.0 + p[0] * p[0]) / (4.0 * pi * (1.0 - p[0] * p[0]));
      break;
    case SectionKind::i_profile:
    case SectionKind::h_profile:
      need(2);
      require(p[0] >= 1.0 && p[1] > 2.0, "section '" + s.id + "': profile needs width >= t and height > 2t");
      s.eta2 = profile_eta2(p[0], p[1]);
      break;
    case SectionKind::thin_tube: {
      need(1);
      require(p[0] > 2.0, "section '" + s.id + "': tube diameter must exceed twice the wall");
      const double ro = p[0] / 2.0;
      const double ri = ro - 1.0;
      const double area = pi * (ro * ro - ri * ri);
      const double inertia = pi / 4.0 * (std::pow(ro, 4) - std::pow(ri, 4));
      s.eta2 = inertia / (area * area);
      break;
    }
    case SectionKind::custom:
      need(2);
      s.eta2 = p[0];
      s.eta3 = p[1];
      break;
  }
  require(s.eta2 >= 0.0 && s.eta3 >= 0.0, "section '" + s.id + "': negative inertia coefficient");
  return s;
}

std::optional<SectionKind> parse_section_kind(const std::string& name) {
  static const std::map<std::string, SectionKind> kinds = {
      {"rect-width", SectionKind::rect_width},
      {"rect-aspect", SectionKind::rect_aspect},
      {"circular-hollow", SectionKind::circular_hollow},
      {"i-profile", SectionKind::i_profile},
      {"h-profile", SectionKind::h_profile},
      {"thin-tube", SectionKind::thin_tube},
      {"custom", SectionKind::custom},
  };
  auto it = kinds.find(name);
  if (it == kinds.end()) return std::nullopt;
  return it->second;
}

std::string to_string(SectionKind kind) {
  switch (kind) {
    case SectionKind::rect_width: return "rect-width";
    case SectionKind::rect_aspect: return "rect-aspect";
    case SectionKind::circular_hollow: return "circular-hollow";
    case SectionKind::i_profile: return "i-profile";
    case SectionKind::h_profile: return "h-profile";
    case SectionKind::thin_tube: return "thin-tube";
    case SectionKind::custom: return "custom";
  }
  return "unknown";
}

double FrameModel::length(int e) const {
  const auto& el = elements.at(static_cast<std::size_t>(e));
  const auto& a = nodes.at(static_cast<std::size_t>(el.node_i));
  const auto& b = nodes.at(static_cast<std::size_t>(el.node_j));
  return std::hypot(b.x - a.x, b.y - a.y);
}

int FrameModel::node_index(const std::string& id) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].id == id) return static_cast<int>(i);
  throw ModelError("unknown node '" + id + "'");
}

std::vector<int> group_map(const FrameModel& model) {
  const int ne = static_cast<int>(model.elements.size());
  std::vector<int> owner(static_cast<std::size_t>(ne), -1);
  for (std::size_t g = 0; g < model.groups.size(); ++g) {
    for (int e : model.groups[g]) {
      require(e >= 0 && e < ne, "group references element " + std::to_string(e + 1) + " out of range");
      require(owner[static_cast<std::size_t>(e)] < 0,
              "element " + std::to_string(e + 1) + " belongs to more than one group");
      owner[static_cast<std::size_t>(e)] = static_cast<int>(g);
    }
  }
  std::vector<int> out(static_cast<std::size_t>(ne), -1);
  std::map<int, int> renumber;
  int next = 0;
  for (int e = 0; e < ne; ++e) {
    const int g = owner[static_cast<std::size_t>(e)];
    if (g < 0) {
      out[static_cast<std::size_t>(e)] = next++;
      continue;
    }
    auto [it, inserted] = renumber.try_emplace(g, next);
    if (inserted) ++next;
    out[static_cast<std::size_t>(e)] = it->second;
  }
  return out;
}

int group_count(const FrameModel& model) {
  const auto m = group_map(model);
  return m.empty() ? 0 : *std::max_element(m.begin(), m.end()) + 1;
}

DofMap make_dof_map(const FrameModel& model) {
  static const char* names[3] = {"ux", "uy", "rz"};
  DofMap map;
  map.index.assign(model.nodes.size(), {0, 0, 0});
  for (const auto& s : model.supports) {
    require(s.node >= 0 && s.node < static_cast<int>(model.nodes.size()), "support references unknown node");
    for (int k = 0; k < 3; ++k)
      if (s.fixed[static_cast<std::size_t>(k)]) map.index[static_cast<std::size_t>(s.node)][static_cast<std::size_t>(k)] = -1;
  }
  for (std::size_t n = 0; n < model.nodes.size(); ++n) {
    for (int k = 0; k < 3; ++k) {
      int& slot = map.index[n][static_cast<std::size_t>(k)];
      if (slot < 0) continue;
      slot = map.free++;
      map.labels.push_back(model.nodes[n].id + "." + names[k]);
    }
  }
  return map;
}

ElementBlocks element_blocks(const FrameModel& model, int e) {
  const auto& el = model.elements.at(static_cast<std::size_t>(e));
  require(el.node_i != el.node_j, "element " + std::to_string(e + 1) + " connects a node to itself");
  const double len = model.length(e);
  require(len > 0.0, "element " + std::to_string(e + 1) + " has zero length");
  const auto& a = model.nodes[static_cast<std::size_t>(el.node_i)];
  const auto& b = model.nodes[static_cast<std::size_t>(el.node_j)];
  const double c = (b.x - a.x) / len;
  const double s = (b.y - a.y) / len;

  // Local order (u1, v1, t1, u2, v2, t2).
  Eigen::Matrix<double, 6, 6> axial = Eigen::Matrix<double, 6, 6>::Zero();
  axial(0, 0) = axial(3, 3) = 1.0 / len;
  axial(0, 3) = axial(3, 0) = -1.0 / len;

  const double l2 = len * len;
  const double l3 = l2 * len;
  Eigen::Matrix4d hermite;
  hermite << 12.0 / l3, 6.0 / l2, -12.0 / l3, 6.0 / l2,
             6.0 / l2, 4.0 / len, -6.0 / l2, 2.0 / len,
             -12.0 / l3, -6.0 / l2, 12.0 / l3, -6.0 / l2,
             6.0 / l2, 2.0 / len, -6.0 / l2, 4.0 / len;
  Eigen::Matrix<double, 6, 6> bending = Eigen::Matrix<double, 6, 6>::Zero();
  const int idx[4] = {1, 2, 4, 5};
  for (int p = 0; p < 4; ++p)
    for (int q = 0; q < 4; ++q) bending(idx[p], idx[q]) = hermite(p, q);

  Eigen::Matrix<double, 6, 6> rot = Eigen::Matrix<double, 6, 6>::Zero();
  for (int k = 0; k < 2; ++k) {
    const int o = 3 * k;
    rot(o, o) = c;
    rot(o, o + 1) = s;
    rot(o + 1, o) = -s;
    rot(o + 1, o + 1) = c;
    rot(o + 2, o + 2) = 1.0;
  }
  ElementBlocks out;
  out.axial = rot.transpose() * axial * rot;
  out.bending = rot.transpose() * bending * rot;
  out.axial = 0.5 * (out.axial + out.axial.transpose()).eval();
  out.bending = 0.5 * (out.bending + out.bending.transpose()).eval();
  return out;
}

namespace {

std::string near_null_dofs(const Eigen::MatrixXd& k, const DofMap& map) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k);
  const double top = std::max(eig.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
  std::set<int> dofs;
  for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
    if (eig.eigenvalues()[i] > 1e-10 * top) continue;
    const Eigen::VectorXd v = eig.eigenvectors().col(i);
    for (Eigen::Index d = 0; d < v.size(); ++d)
      if (std::abs(v[d]) > 0.1) dofs.insert(static_cast<int>(d));
  }
  std::ostringstream os;
  bool first = true;
  for (int d : dofs) {
    os << (first ? "" : ", ") << map.labels[static_cast<std::size_t>(d)];
    first = false;
  }
  return os.str();
}

bool psd_within(const Eigen::MatrixXd& m, double rel) {
  if (m.size() == 0) return true;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
  const double norm = eig.eigenvalues().cwiseAbs().maxCoeff();
  return eig.eigenvalues().minCoeff() >= -rel * norm;
}

}  // namespace

StiffnessCoeffs<double> assemble(const FrameModel& model) {
  auto coeffs = assemble_raw<double>(model);
  for (std::size_t e = 0; e < coeffs.element.size(); ++e) {
    for (int i = 0; i < 3; ++i) {
      if (!psd_within(Eigen::MatrixXd(coeffs.element[e][static_cast<std::size_t>(i)]), 1e-9))
        throw ModelError("element " + std::to_string(e + 1) + " coefficient K^(" + std::to_string(i + 1) +
                         ") is not positive semidefinite");
    }
  }
  const Eigen::MatrixXd k1 = coeffs.evaluate(Eigen::VectorXd::Ones(static_cast<Eigen::Index>(model.elements.size())));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k1, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() <= 1e-10 * eig.eigenvalues().cwiseAbs().maxCoeff())
    throw ModelError("rigid body motion: K(1) is singular; near-null-space DOFs: " + near_null_dofs(k1, coeffs.dof_map));
  return coeffs;
}

PseudoSolve pseudo_solve(const Eigen::MatrixXd& k, const Eigen::VectorXd& f) {
  PseudoSolve out;
  const Eigen::MatrixXd sym = 0.5 * (k + k.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  const Eigen::VectorXd& lam = eig.eigenvalues();
  const double top = lam.size() ? lam.cwiseAbs().maxCoeff() : 0.0;
  const double cutoff = 1e-10 * top;
  const Eigen::VectorXd proj = eig.eigenvectors().transpose() * f;
  Eigen::VectorXd coef = Eigen::VectorXd::Zero(lam.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i)
    if (top > 0.0 && std::abs(lam[i]) > cutoff) coef[i] = proj[i] / lam[i];
  out.u = eig.eigenvectors() * coef;
  const double fn = f.norm();
  out.in_image = (sym * out.u - f).norm() <= 1e-8 * fn;
  return out;
}

double compliance_of(const Eigen::MatrixXd& k, const Eigen::VectorXd& f) {
  const auto sol = pseudo_solve(k, f);
  if (!sol.in_image) return std::numeric_limits<double>::infinity();
  return f.dot(sol.u);
}

double compliance_of(const StiffnessCoeffs<double>& coeffs, const Eigen::VectorXd& f, const Eigen::VectorXd& a) {
  if (a.size() != static_cast<Eigen::Index>(coeffs.element.size()))
    throw std::invalid_argument("design vector has wrong length");
  return compliance_of(coeffs.evaluate(a), f);
}

Eigen::VectorXd weight_factors(const FrameModel& model) {
  Eigen::VectorXd w(static_cast<Eigen::Index>(model.elements.size()));
  for (int e = 0; e < static_cast<int>(model.elements.size()); ++e)
    w[e] = model.length(e) * model.elements[static_cast<std::size_t>(e)].density;
  return w;
}

double weight_of(const FrameModel& model, const Eigen::VectorXd& a) {
  if (a.size() != static_cast<Eigen::Index>(model.elements.size()))
    throw std::invalid_argument("design vector has wrong length");
  return weight_factors(model).dot(a);
}

std::vector<Diagnostic> validate(const FrameModel& model) {
  using S = Diagnostic::Severity;
  std::vector<Diagnostic> out;
  auto error = [&](std::string m) { out.push_back({S::error, std::move(m)}); };
  const int nn = static_cast<int>(model.nodes.size());

  if (model.nodes.empty()) error("model has no nodes");
  if (model.elements.empty()) error("model has no elements");
  if (!(model.young > 0.0)) error("Young modulus must be positive");
  for (std::size_t e = 0; e < model.elements.size(); ++e) {
    const auto& el = model.elements[e];
    const std::string tag = "element " + std::to_string(e + 1);
    if (el.node_i < 0 || el.node_i >= nn || el.node_j < 0 || el.node_j >= nn) {
      error(tag + " references a missing node");
      continue;
    }
    if (el.node_i == el.node_j) error(tag + " connects a node to itself");
    else if (!(model.length(static_cast<int>(e)) > 0.0)) error(tag + " has zero length");
    if (!model.sections.contains(el.section)) error(tag + " references unknown section '" + el.section + "'");
    if (!(el.density > 0.0)) error(tag + " has non-positive density");
  }
  for (const auto& l : model.loads)
    if (l.node < 0 || l.node >= nn) error("load references a missing node");
  if (model.area_cap && !(*model.area_cap > 0.0)) error("area cap must be positive");
  if (!out.empty()) return out;

  try {
    group_map(model);
  } catch (const ModelError& ex) {
    error(ex.what());
  }
  const DofMap map = make_dof_map(model);
  const int total = 3 * nn;
  if (map.free == 0) error("no free degrees of freedom");
  if (map.free == total) error("rigid body motion: no degree of freedom is fixed");
  if (!out.empty()) return out;

  const auto coeffs = assemble_raw<double>(model);
  for (std::size_t e = 0; e < coeffs.element.size(); ++e) {
    for (int i = 0; i < 3; ++i) {
      if (!psd_within(Eigen::MatrixXd(coeffs.element[e][static_cast<std::size_t>(i)]), 1e-9))
        error("element " + std::to_string(e + 1) + " coefficient K^(" + std::to_string(i + 1) + ") is indefinite");
    }
  }
  const Eigen::MatrixXd k1 = coeffs.evaluate(Eigen::VectorXd::Ones(static_cast<Eigen::Index>(model.elements.size())));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k1, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() <= 1e-10 * eig.eigenvalues().cwiseAbs().maxCoeff())
    error("rigid body motion: near-null-space DOFs " + near_null_dofs(k1, map));
  if (coeffs.load.norm() == 0.0) error("load vector vanishes on the free DOFs");
  out.push_back({S::info, std::to_string(map.free) + " free DOFs, " + std::to_string(model.elements.size()) +
                              " elements, " + std::to_string(group_count(model)) + " design variables"});
  return out;
}

}  // namespace framopt
