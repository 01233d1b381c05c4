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

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "framopt/frame.hpp"
#include "framopt/polynomial.hpp"

namespace framopt {

class BoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Mode { compliance, weight };

std::string to_string(Mode mode);
std::optional<Mode> parse_mode(const std::string& name);

// value = offset + slope * scaled.
struct AffineMap {
  double offset = 0.0;
  double slope = 1.0;

  double operator()(double scaled) const { return offset + slope * scaled; }
  double inverse(double value) const { return (value - offset) / slope; }
};

// Polynomial problem over scaled variables in [-1, 1]:
//   weight mode:     min w(x)  s.t. [[cbar, -f^T], [-f, K(x)]] >= 0, boxes
//   compliance mode: min c     s.t. [[c, -f^T], [-f, K(x)]] >= 0,
//                                   weight(x) <= wbar, boxes
struct ScaledPop {
  Mode mode = Mode::weight;
  int n = 0;
  int groups = 0;
  // Index of the scaled compliance variable, -1 in weight mode.
  int compliance_var = -1;
  Polynomiald objective;
  // Ordered: PMI, resource (compliance mode), group boxes, compliance box.
  std::vector<PolyMatrixd> constraints;
  std::vector<std::string> constraint_names;
  std::vector<AffineMap> descale;
  std::vector<int> group_of_element;
  // Per group: the area bound reached at x = 1.
  std::vector<double> upper_area;
  double wbar = 0.0;
  double cbar = 0.0;
  // Scaled image of the design used to derive the bounds.
  Eigen::VectorXd reference_point;
};

// Compliance of the uniform design exhausting wbar.
double compute_cbar(const FrameModel& model, const StiffnessCoeffs<double>& coeffs, double wbar);
// Weight of the lightest uniform design meeting cbar (bisection on the
// uniform area, relative gap 1e-10, cap 1e9).
double compute_wbar(const FrameModel& model, const StiffnessCoeffs<double>& coeffs, double cbar);

struct Bounds {
  double wbar = 0.0;
  double cbar = 0.0;
};

// The mode's own bound comes from `bound`, then the model file, then the
// complementary model bound via compute_*; the other one is derived.
Bounds resolve_bounds(const FrameModel& model, const StiffnessCoeffs<double>& coeffs, Mode mode,
                      std::optional<double> bound);

// `bound` is wbar in compliance mode and cbar in weight mode.
ScaledPop build_pop(const FrameModel& model, const StiffnessCoeffs<double>& coeffs, Mode mode, double bound);
ScaledPop build_pop(const FrameModel& model, const StiffnessCoeffs<double>& coeffs, Mode mode, const Bounds& bounds);

// Per-element areas from first-order moments of the group variables;
// moments are clamped to [-1, 1] first.
Eigen::VectorXd descale(const ScaledPop& pop, const Eigen::VectorXd& first_order);
// Scaled group variables of a per-element design (group members must agree).
Eigen::VectorXd scale(const ScaledPop& pop, const Eigen::VectorXd& areas);
double descale_compliance(const ScaledPop& pop, double scaled);

}  // namespace framopt
