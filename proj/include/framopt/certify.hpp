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
#include <string>

#include "framopt/frame.hpp"
#include "framopt/pop.hpp"
#include "framopt/relaxation.hpp"

namespace framopt {

struct Flatness {
  int rank_r = 0;
  int rank_rd = 0;
  bool holds = false;
};

// Numerical rank: singular values above rel_tol * sigma_max.
int numerical_rank(const Eigen::MatrixXd& m, double rel_tol);

// max_j d_j over the constraints.
int max_half_degree(const ScaledPop& pop);

// Compares rank M_r(y) with rank M_{r-d}(y) over the standard basis. Throws
// std::invalid_argument if y lacks a needed moment.
Flatness flatness_check(const MomentIndex& index, const Eigen::VectorXd& y, int r, int d, double rel_tol = 1e-3);

// Not applicable (nullopt) unless the relaxation is the dense standard one.
std::optional<Flatness> flatness_check(const Relaxation& rel, const ScaledPop& pop, const Eigen::VectorXd& y,
                                       double rel_tol = 1e-3);

struct CertificateReport {
  Mode mode = Mode::compliance;
  double lower = 0.0;
  // Reconstructed per-element areas (weight mode: already scaled by delta*).
  Eigen::VectorXd design;
  std::optional<double> upper;
  std::optional<double> epsilon;
  std::optional<double> epsilon_rel;
  std::optional<Flatness> flatness;
  std::optional<double> delta_star;
  // Why a part of the certificate is missing.
  std::string note;
};

// Compliance mode: areas from the first-order moments, c~ = f' K(a~)^+ f,
// eps = c~ - 0.5 (y_c + 1) cbar.
CertificateReport compliance_upper_bound(const ScaledPop& pop, const StiffnessCoeffs<double>& coeffs,
                                         const Eigen::VectorXd& y_first, double lower);

// Smallest delta >= 1 with compliance(delta * a~) <= cbar; bracket grows
// geometrically from 1, bisection to relative gap 1e-10.
double delta_star(const StiffnessCoeffs<double>& coeffs, const Eigen::VectorXd& base, double cbar);

// Weight mode: upper = delta* weight(a~), eps = (delta* - 1) weight(a~).
CertificateReport weight_delta_star(const FrameModel& model, const ScaledPop& pop,
                                    const StiffnessCoeffs<double>& coeffs, const Eigen::VectorXd& y_first, double lower);

}  // namespace framopt
