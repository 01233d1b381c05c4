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
#include <Eigen/Sparse>

#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace framopt {

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Node {
  std::string id;
  double x = 0.0;
  double y = 0.0;
};

enum class SectionKind {
  rect_width,       // fixed width w, free height
  rect_aspect,      // height = ratio * width
  circular_hollow,  // inner radius = ratio * outer radius
  i_profile,        // flange width b, overall height h, wall thickness t
  h_profile,        // same parametrization as i_profile, taller web
  thin_tube,        // outer diameter D, wall thickness t
  custom,           // eta2, eta3 given directly
};

// Second moment of area as I(a) = eta2 a^2 + eta3 a^3.
struct SectionPreset {
  std::string id;
  SectionKind kind = SectionKind::custom;
  std::vector<double> params;
  double eta2 = 0.0;
  double eta3 = 0.0;
};

SectionPreset make_section(std::string id, SectionKind kind, std::vector<double> params);
std::optional<SectionKind> parse_section_kind(const std::string& name);
std::string to_string(SectionKind kind);

struct Element {
  int node_i = 0;
  int node_j = 0;
  std::string section;
  double density = 1.0;
};

enum Dof : int { ux = 0, uy = 1, rz = 2 };

struct Support {
  int node = 0;
  std::array<bool, 3> fixed{};
};

struct NodalLoad {
  int node = 0;
  std::array<double, 3> value{};
};

struct FrameModel {
  std::string name;
  std::string notes;
  double young = 1.0;
  std::vector<Node> nodes;
  std::vector<Element> elements;
  std::map<std::string, SectionPreset> sections;
  std::vector<Support> supports;
  std::vector<NodalLoad> loads;
  // Each inner list holds element indices sharing one design variable.
  std::vector<std::vector<int>> groups;
  std::optional<double> area_cap;
  std::optional<double> wbar;
  std::optional<double> cbar;
  // Compliance mode: whether the scaled compliance variable gets a box.
  bool bound_compliance_variable = true;

  double length(int e) const;
  int node_index(const std::string& id) const;
};

// Element -> design-variable index; ungrouped elements get their own slot.
// Variables are numbered in order of first appearance over the elements.
std::vector<int> group_map(const FrameModel& model);
int group_count(const FrameModel& model);

struct DofMap {
  // index[node][dof] = free-DOF number or -1 when fixed.
  std::vector<std::array<int, 3>> index;
  int free = 0;
  // Human-readable label of each free DOF, e.g. "b.rz".
  std::vector<std::string> labels;
};

DofMap make_dof_map(const FrameModel& model);

// 6x6 global-axis element blocks for unit area (axial) and unit second
// moment (bending), ordered (ux, uy, rz) at node i then node j.
struct ElementBlocks {
  Eigen::Matrix<double, 6, 6> axial;
  Eigen::Matrix<double, 6, 6> bending;
};

ElementBlocks element_blocks(const FrameModel& model, int e);

template <typename Scalar = double>
struct StiffnessCoeffs {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Sparse = Eigen::SparseMatrix<Scalar>;

  int dofs = 0;
  Matrix k0;
  // element[e][i] holds K_e^(i+1).
  std::vector<std::array<Sparse, 3>> element;
  Vector load;
  DofMap dof_map;

  template <typename Derived>
  Matrix evaluate(const Eigen::MatrixBase<Derived>& a) const {
    Matrix k = k0;
    for (std::size_t e = 0; e < element.size(); ++e) {
      const Scalar ae = static_cast<Scalar>(a[static_cast<Eigen::Index>(e)]);
      Scalar power = ae;
      for (int i = 0; i < 3; ++i, power *= ae) {
        if (element[e][static_cast<std::size_t>(i)].nonZeros() > 0)
          k += power * Matrix(element[e][static_cast<std::size_t>(i)]);
      }
    }
    return k;
  }
};

// Per-element coefficient matrices over free DOFs.
template <typename Scalar = double>
std::array<Eigen::SparseMatrix<Scalar>, 3> element_stiffness(const FrameModel& model, const DofMap& dofs, int e) {
  const auto& el = model.elements.at(static_cast<std::size_t>(e));
  auto sec = model.sections.find(el.section);
  if (sec == model.sections.end())
    throw ModelError("element " + std::to_string(e + 1) + " references unknown section '" + el.section + "'");
  const ElementBlocks blocks = element_blocks(model, e);
  const std::array<Eigen::Matrix<double, 6, 6>, 3> local = {
      model.young * blocks.axial, model.young * sec->second.eta2 * blocks.bending,
      model.young * sec->second.eta3 * blocks.bending};
  std::array<int, 6> map{};
  for (int k = 0; k < 3; ++k) {
    map[static_cast<std::size_t>(k)] = dofs.index[static_cast<std::size_t>(el.node_i)][static_cast<std::size_t>(k)];
    map[static_cast<std::size_t>(k + 3)] = dofs.index[static_cast<std::size_t>(el.node_j)][static_cast<std::size_t>(k)];
  }
  std::array<Eigen::SparseMatrix<Scalar>, 3> out;
  for (int i = 0; i < 3; ++i) {
    std::vector<Eigen::Triplet<Scalar>> trip;
    for (int p = 0; p < 6; ++p) {
      for (int q = 0; q < 6; ++q) {
        const int gp = map[static_cast<std::size_t>(p)];
        const int gq = map[static_cast<std::size_t>(q)];
        const double v = local[static_cast<std::size_t>(i)](p, q);
        if (gp < 0 || gq < 0 || v == 0.0) continue;
        trip.emplace_back(gp, gq, static_cast<Scalar>(v));
      }
    }
    out[static_cast<std::size_t>(i)].resize(dofs.free, dofs.free);
    out[static_cast<std::size_t>(i)].setFromTriplets(trip.begin(), trip.end());
  }
  return out;
}

// Unvalidated assembly; see assemble() for the checked entry point.
template <typename Scalar = double>
StiffnessCoeffs<Scalar> assemble_raw(const FrameModel& model) {
  StiffnessCoeffs<Scalar> c;
  c.dof_map = make_dof_map(model);
  c.dofs = c.dof_map.free;
  if (c.dofs == 0) throw ModelError("model has no free degrees of freedom");
  c.k0 = StiffnessCoeffs<Scalar>::Matrix::Zero(c.dofs, c.dofs);
  c.element.reserve(model.elements.size());
  for (int e = 0; e < static_cast<int>(model.elements.size()); ++e)
    c.element.push_back(element_stiffness<Scalar>(model, c.dof_map, e));
  c.load = StiffnessCoeffs<Scalar>::Vector::Zero(c.dofs);
  for (const auto& l : model.loads) {
    for (int k = 0; k < 3; ++k) {
      const int g = c.dof_map.index[static_cast<std::size_t>(l.node)][static_cast<std::size_t>(k)];
      if (g >= 0) c.load[g] += static_cast<Scalar>(l.value[static_cast<std::size_t>(k)]);
    }
  }
  return c;
}

// Assembles and validates: PSD element blocks and K(1) positive definite.
StiffnessCoeffs<double> assemble(const FrameModel& model);

struct PseudoSolve {
  Eigen::VectorXd u;
  bool in_image = false;
};

// u = K^+ f via symmetric eigendecomposition (cutoff 1e-10 lambda_max) and
// the image test ||K K^+ f - f|| <= 1e-8 ||f||.
PseudoSolve pseudo_solve(const Eigen::MatrixXd& k, const Eigen::VectorXd& f);

// f^T K(a)^+ f, or +infinity when f is outside the image of K(a).
double compliance_of(const StiffnessCoeffs<double>& coeffs, const Eigen::VectorXd& f, const Eigen::VectorXd& a);
double compliance_of(const Eigen::MatrixXd& k, const Eigen::VectorXd& f);

double weight_of(const FrameModel& model, const Eigen::VectorXd& a);
// l_e * rho_e per element.
Eigen::VectorXd weight_factors(const FrameModel& model);

struct Diagnostic {
  enum class Severity { info, error };
  Severity severity = Severity::info;
  std::string message;
};

// Structural checks used by the validate subcommand.
std::vector<Diagnostic> validate(const FrameModel& model);

}  // namespace framopt
