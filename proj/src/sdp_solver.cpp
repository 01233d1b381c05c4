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

#include "framopt/sdp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

namespace framopt {

void SolverConfig::check() const {
  if (!(tolerance > 0.0 && tolerance <= 1e-2)) throw std::invalid_argument("solver tolerance must lie in (0, 1e-2]");
  if (max_iterations < 1) throw std::invalid_argument("solver iteration limit must be positive");
  if (memory_cap == 0) throw std::invalid_argument("memory cap must be positive");
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Coef {
  int row;
  int col;
  double value;
};

// One block with side > 1.
struct DenseBlock {
  int n = 0;
  MatrixXd constant;
  // Global variable ids touching the block, ascending.
  std::vector<int> vars;
  std::vector<std::vector<Coef>> upper;
  std::vector<std::vector<Coef>> full;
  std::vector<std::vector<int>> rows;
};

// All 1x1 blocks as one diagonal block.
struct DiagBlock {
  VectorXd constant;
  std::vector<std::vector<std::pair<int, double>>> rows;
  int n() const { return static_cast<int>(constant.size()); }
};

struct Layout {
  int m = 0;
  VectorXd cost;
  double cost_constant = 0.0;
  std::vector<DenseBlock> dense;
  DiagBlock diag;
  int order = 0;  // total side, the "N" in mu = X.S / N
};

Layout make_layout(const SdpProblem& p) {
  Layout L;
  L.m = static_cast<int>(p.nvar);
  L.cost = VectorXd::Zero(L.m);
  L.cost_constant = p.objective_constant;
  for (const auto& [var, c] : p.objective) L.cost[var - 1] += c;

  std::vector<double> diag_const;
  for (const auto& blk : p.blocks) {
    if (blk.size == 1) {
      double c0 = 0.0;
      std::vector<std::pair<int, double>> row;
      for (const auto& e : blk.entries) {
        if (e.var == 0) c0 += e.value;
        else row.emplace_back(e.var, e.value);
      }
      diag_const.push_back(c0);
      L.diag.rows.push_back(std::move(row));
      continue;
    }
    DenseBlock d;
    d.n = blk.size;
    d.constant = MatrixXd::Zero(d.n, d.n);
    for (const auto& e : blk.entries) {
      if (e.var == 0) {
        d.constant(e.row, e.col) += e.value;
        if (e.row != e.col) d.constant(e.col, e.row) += e.value;
        continue;
      }
      if (d.vars.empty() || d.vars.back() != e.var) {
        d.vars.push_back(e.var);
        d.upper.emplace_back();
        d.full.emplace_back();
        d.rows.emplace_back();
      }
      d.upper.back().push_back({e.row, e.col, e.value});
      d.full.back().push_back({e.row, e.col, e.value});
      if (e.row != e.col) d.full.back().push_back({e.col, e.row, e.value});
    }
    for (std::size_t k = 0; k < d.vars.size(); ++k) {
      auto& r = d.rows[k];
      for (const auto& c : d.full[k]) r.push_back(c.row);
      std::sort(r.begin(), r.end());
      r.erase(std::unique(r.begin(), r.end()), r.end());
    }
    L.order += d.n;
    L.dense.push_back(std::move(d));
  }
  L.diag.constant = Eigen::Map<VectorXd>(diag_const.data(), static_cast<Eigen::Index>(diag_const.size()));
  L.order += L.diag.n();
  return L;
}

double inner(const std::vector<Coef>& upper, const MatrixXd& b) {
  double s = 0.0;
  for (const auto& c : upper) s += c.value * b(c.row, c.col) * (c.row == c.col ? 1.0 : 2.0);
  return s;
}

struct Point {
  VectorXd y;
  std::vector<MatrixXd> x, s;
  VectorXd xd, sd;
};

// C + sum y_i A_i per block.
void affine(const Layout& L, const VectorXd& y, bool with_constant, std::vector<MatrixXd>& out, VectorXd& out_diag) {
  out.resize(L.dense.size());
  for (std::size_t b = 0; b < L.dense.size(); ++b) {
    const auto& d = L.dense[b];
    out[b] = with_constant ? d.constant : MatrixXd::Zero(d.n, d.n);
    for (std::size_t k = 0; k < d.vars.size(); ++k) {
      const double yk = y[d.vars[k] - 1];
      if (yk == 0.0) continue;
      for (const auto& c : d.full[k]) out[b](c.row, c.col) += yk * c.value;
    }
  }
  out_diag = with_constant ? L.diag.constant : VectorXd::Zero(L.diag.n());
  for (int k = 0; k < L.diag.n(); ++k)
    for (const auto& [var, a] : L.diag.rows[static_cast<std::size_t>(k)]) out_diag[k] += y[var - 1] * a;
}

// A(X)_i = A_i . X
VectorXd adjoint(const Layout& L, const std::vector<MatrixXd>& x, const VectorXd& xd) {
  VectorXd out = VectorXd::Zero(L.m);
  for (std::size_t b = 0; b < L.dense.size(); ++b) {
    const auto& d = L.dense[b];
    for (std::size_t k = 0; k < d.vars.size(); ++k) out[d.vars[k] - 1] += inner(d.upper[k], x[b]);
  }
  for (int k = 0; k < L.diag.n(); ++k)
    for (const auto& [var, a] : L.diag.rows[static_cast<std::size_t>(k)]) out[var - 1] += a * xd[k];
  return out;
}

double dot(const std::vector<MatrixXd>& a, const VectorXd& ad, const std::vector<MatrixXd>& b, const VectorXd& bd) {
  double s = ad.dot(bd);
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i].cwiseProduct(b[i]).sum();
  return s;
}

double frob(const std::vector<MatrixXd>& a, const VectorXd& ad) { return std::sqrt(dot(a, ad, a, ad)); }

struct NumericalFailure {};

// NT scaling: W = R R', R' S R = R^-1 X R^-T = diag(lambda).
struct Scaling {
  MatrixXd r, rinv, w;
  VectorXd lambda;
};

Scaling nt_scaling(const MatrixXd& x, const MatrixXd& s) {
  Eigen::LLT<MatrixXd> lx(x), ls(s);
  if (lx.info() != Eigen::Success || ls.info() != Eigen::Success) throw NumericalFailure{};
  const MatrixXd Lx = lx.matrixL();
  const MatrixXd Ls = ls.matrixL();
  Eigen::BDCSVD<MatrixXd> svd(Ls.transpose() * Lx, Eigen::ComputeFullV);
  Scaling sc;
  sc.lambda = svd.singularValues();
  if ((sc.lambda.array() <= 0.0).any() || !sc.lambda.allFinite()) throw NumericalFailure{};
  const VectorXd inv_sqrt = sc.lambda.cwiseSqrt().cwiseInverse();
  sc.r = Lx * svd.matrixV() * inv_sqrt.asDiagonal();
  const MatrixXd z = Lx.transpose().triangularView<Eigen::Upper>().solve(svd.matrixV());
  sc.rinv = sc.lambda.cwiseSqrt().asDiagonal() * z.transpose();
  sc.w = sc.r * sc.r.transpose();
  sc.w = 0.5 * (sc.w + sc.w.transpose());
  return sc;
}

// Upper triangle of the Schur complement M_ij = A_i . (W A_j W).
MatrixXd schur(const Layout& L, const std::vector<Scaling>& sc, const VectorXd& wd) {
  MatrixXd M = MatrixXd::Zero(L.m, L.m);
  for (std::size_t b = 0; b < L.dense.size(); ++b) {
    const auto& d = L.dense[b];
    const MatrixXd& W = sc[b].w;
    const double n2 = static_cast<double>(d.n) * d.n;
    std::vector<int> pos(static_cast<std::size_t>(d.n), -1);
    double nnz_prefix = 0.0;
    for (std::size_t j = 0; j < d.vars.size(); ++j) {
      nnz_prefix += static_cast<double>(d.full[j].size());
      const double dense_cost = n2 * static_cast<double>(d.rows[j].size()) + nnz_prefix;
      const double pair_cost = static_cast<double>(d.full[j].size()) * nnz_prefix;
      const int gj = d.vars[j] - 1;
      if (pair_cost < dense_cost) {
        for (std::size_t i = 0; i <= j; ++i) {
          double s = 0.0;
          for (const auto& a : d.full[i])
            for (const auto& c : d.full[j]) s += a.value * c.value * W(a.col, c.row) * W(c.col, a.row);
          M(d.vars[i] - 1, gj) += s;
        }
      } else {
        const auto& rows = d.rows[j];
        const int t = static_cast<int>(rows.size());
        for (int q = 0; q < t; ++q) pos[static_cast<std::size_t>(rows[static_cast<std::size_t>(q)])] = q;
        MatrixXd T = MatrixXd::Zero(t, d.n);
        for (const auto& c : d.full[j]) T.row(pos[static_cast<std::size_t>(c.row)]) += c.value * W.row(c.col);
        const MatrixXd G = W(Eigen::all, rows) * T;
        for (int q = 0; q < t; ++q) pos[static_cast<std::size_t>(rows[static_cast<std::size_t>(q)])] = -1;
        for (std::size_t i = 0; i <= j; ++i) M(d.vars[i] - 1, gj) += inner(d.upper[i], G);
      }
    }
  }
  for (int k = 0; k < L.diag.n(); ++k) {
    const auto& row = L.diag.rows[static_cast<std::size_t>(k)];
    for (std::size_t a = 0; a < row.size(); ++a)
      for (std::size_t b = a; b < row.size(); ++b) {
        const int i = std::min(row[a].first, row[b].first) - 1;
        const int j = std::max(row[a].first, row[b].first) - 1;
        M(i, j) += row[a].second * row[b].second * wd[k];
      }
  }
  return M;
}

struct Direction {
  VectorXd dy;
  std::vector<MatrixXd> dx, ds;
  VectorXd dxd, dsd;
};

// Largest step keeping diag(lambda) + alpha * D PSD.
double max_step(const VectorXd& lambda, const MatrixXd& scaled_dir) {
  const VectorXd is = lambda.cwiseSqrt().cwiseInverse();
  const MatrixXd D = is.asDiagonal() * scaled_dir * is.asDiagonal();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (D + D.transpose()), Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  return lo >= 0.0 ? std::numeric_limits<double>::infinity() : -1.0 / lo;
}

double max_step_diag(const VectorXd& v, const VectorXd& dv) {
  double a = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < v.size(); ++k)
    if (dv[k] < 0.0) a = std::min(a, -v[k] / dv[k]);
  return a;
}

class Solver {
 public:
  Solver(const SdpProblem& p, const SolverConfig& cfg) : L_(make_layout(p)), cfg_(cfg) {}

  SdpResult run();

 private:
  void initial_point();
  Direction direction(const std::vector<MatrixXd>& rhs, const VectorXd& rhs_d, const std::vector<MatrixXd>& rd,
                      const VectorXd& rdd, const VectorXd& rp);
  bool factor(MatrixXd M);

  Layout L_;
  SolverConfig cfg_;
  Point pt_;
  std::vector<Scaling> sc_;
  VectorXd wd_, rd_scale_, lambda_d_;
  Eigen::LLT<MatrixXd, Eigen::Upper> llt_;
};

void Solver::initial_point() {
  pt_.y = VectorXd::Zero(L_.m);
  pt_.x.clear();
  pt_.s.clear();
  for (const auto& d : L_.dense) {
    double xi = std::max(10.0, std::sqrt(static_cast<double>(d.n)));
    double eta = std::max({10.0, std::sqrt(static_cast<double>(d.n)), d.constant.norm()});
    for (std::size_t k = 0; k < d.vars.size(); ++k) {
      double na = 0.0;
      for (const auto& c : d.full[k]) na += c.value * c.value;
      na = std::sqrt(na);
      xi = std::max(xi, d.n * (1.0 + std::abs(L_.cost[d.vars[k] - 1])) / (1.0 + na));
      eta = std::max(eta, na);
    }
    pt_.x.push_back(xi * MatrixXd::Identity(d.n, d.n));
    pt_.s.push_back(eta * MatrixXd::Identity(d.n, d.n));
  }
  const int nd = L_.diag.n();
  if (nd > 0) {
    std::vector<double> norms(static_cast<std::size_t>(L_.m) + 1, 0.0);
    for (const auto& row : L_.diag.rows)
      for (const auto& [var, a] : row) norms[static_cast<std::size_t>(var)] += a * a;
    double xi = std::max(10.0, std::sqrt(static_cast<double>(nd)));
    double eta = std::max({10.0, std::sqrt(static_cast<double>(nd)), L_.diag.constant.norm()});
    for (int v = 1; v <= L_.m; ++v) {
      if (norms[static_cast<std::size_t>(v)] == 0.0) continue;
      const double na = std::sqrt(norms[static_cast<std::size_t>(v)]);
      xi = std::max(xi, nd * (1.0 + std::abs(L_.cost[v - 1])) / (1.0 + na));
      eta = std::max(eta, na);
    }
    pt_.xd = VectorXd::Constant(nd, xi);
    pt_.sd = VectorXd::Constant(nd, eta);
  } else {
    pt_.xd.resize(0);
    pt_.sd.resize(0);
  }
}

bool Solver::factor(MatrixXd M) {
  const double scale = std::max(1.0, M.diagonal().cwiseAbs().maxCoeff());
  for (int attempt = 0; attempt < 8; ++attempt) {
    llt_.compute(M);
    if (llt_.info() == Eigen::Success) return true;
    M.diagonal().array() += scale * std::pow(10.0, -14.0 + 2.0 * attempt);
  }
  return false;
}

Direction Solver::direction(const std::vector<MatrixXd>& rhs, const VectorXd& rhs_d, const std::vector<MatrixXd>& rd,
                            const VectorXd& rdd, const VectorXd& rp) {
  // G = R E R' with E_ij = 2 rhs_ij / (lambda_i + lambda_j).
  std::vector<MatrixXd> g(L_.dense.size()), h(L_.dense.size());
  for (std::size_t b = 0; b < L_.dense.size(); ++b) {
    const auto& lam = sc_[b].lambda;
    const MatrixXd denom = lam.replicate(1, lam.size()) + lam.transpose().replicate(lam.size(), 1);
    const MatrixXd e = 2.0 * rhs[b].cwiseQuotient(denom);
    g[b] = sc_[b].r * e * sc_[b].r.transpose();
    h[b] = g[b] - sc_[b].w * rd[b] * sc_[b].w;
  }
  // Diagonal block: W = sqrt(x/s), R = W^(1/2), wd_ holds W^2.
  const VectorXd gd = rhs_d.cwiseQuotient(lambda_d_).cwiseProduct(wd_.cwiseSqrt());
  const VectorXd hd = gd - wd_.cwiseProduct(rdd);

  Direction dir;
  dir.dy = llt_.solve(adjoint(L_, h, hd) - rp);
  affine(L_, dir.dy, false, dir.ds, dir.dsd);
  dir.dx.resize(L_.dense.size());
  for (std::size_t b = 0; b < L_.dense.size(); ++b) {
    dir.ds[b] += rd[b];
    dir.dx[b] = g[b] - sc_[b].w * dir.ds[b] * sc_[b].w;
    dir.dx[b] = 0.5 * (dir.dx[b] + dir.dx[b].transpose());
  }
  dir.dsd += rdd;
  dir.dxd = gd - wd_.cwiseProduct(dir.dsd);
  return dir;
}

SdpResult Solver::run() {
  SdpResult out;
  auto& sol = out.solution;
  initial_point();

  const double norm_c = L_.cost.norm();
  double norm_C = L_.diag.constant.norm();
  for (const auto& d : L_.dense) norm_C = std::hypot(norm_C, d.constant.norm());

  const double tol = cfg_.tolerance;
  const double loose = std::max(1e-5, std::sqrt(tol));
  int stalls = 0;
  bool failed = false;
  double pobj = 0.0, dobj = 0.0, gap = 0.0, p_inf = 0.0, d_inf = 0.0;
  sol.status = SolveStatus::numerical_failure;

  for (int it = 0;; ++it) {
    std::vector<MatrixXd> rd;
    VectorXd rdd;
    affine(L_, pt_.y, true, rd, rdd);
    for (std::size_t b = 0; b < rd.size(); ++b) rd[b] -= pt_.s[b];
    rdd -= pt_.sd;
    const VectorXd rp = L_.cost - adjoint(L_, pt_.x, pt_.xd);

    pobj = L_.cost.dot(pt_.y) + L_.cost_constant;
    dobj = L_.cost_constant - [&] {
      double s = L_.diag.constant.dot(pt_.xd);
      for (std::size_t b = 0; b < L_.dense.size(); ++b) s += L_.dense[b].constant.cwiseProduct(pt_.x[b]).sum();
      return s;
    }();
    gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    p_inf = frob(rd, rdd) / (1.0 + norm_C);
    d_inf = rp.norm() / (1.0 + norm_c);
    const double mu = dot(pt_.x, pt_.xd, pt_.s, pt_.sd) / std::max(1, L_.order);
    sol.iterations = it;

    if (cfg_.log)
      *cfg_.log << std::setw(3) << it << std::scientific << std::setprecision(3) << "  pobj " << pobj << "  dobj "
                << dobj << "  gap " << gap << "  pinf " << p_inf << "  dinf " << d_inf << "  mu " << mu << '\n'
                << std::defaultfloat;

    if (gap <= tol && p_inf <= tol && d_inf <= tol) {
      sol.status = SolveStatus::optimal;
      break;
    }
    if (it >= cfg_.max_iterations || stalls >= 5 || failed) break;

    try {
      sc_.clear();
      for (std::size_t b = 0; b < L_.dense.size(); ++b) sc_.push_back(nt_scaling(pt_.x[b], pt_.s[b]));
    } catch (const NumericalFailure&) {
      break;
    }
    if ((pt_.xd.array() <= 0.0).any() || (pt_.sd.array() <= 0.0).any()) break;
    wd_ = pt_.xd.cwiseQuotient(pt_.sd);
    lambda_d_ = pt_.xd.cwiseProduct(pt_.sd).cwiseSqrt();

    if (!factor(schur(L_, sc_, wd_))) break;

    // Predictor: rhs = -Lambda^2.
    std::vector<MatrixXd> rhs(L_.dense.size());
    for (std::size_t b = 0; b < rhs.size(); ++b) rhs[b] = (-sc_[b].lambda.array().square()).matrix().asDiagonal();
    VectorXd rhs_d = -lambda_d_.array().square().matrix();
    const Direction pred = direction(rhs, rhs_d, rd, rdd, rp);

    std::vector<MatrixXd> dxs(rhs.size()), dss(rhs.size());
    double ap = max_step_diag(pt_.xd, pred.dxd), ad = max_step_diag(pt_.sd, pred.dsd);
    for (std::size_t b = 0; b < rhs.size(); ++b) {
      dxs[b] = sc_[b].rinv * pred.dx[b] * sc_[b].rinv.transpose();
      dss[b] = sc_[b].r.transpose() * pred.ds[b] * sc_[b].r;
      ap = std::min(ap, max_step(sc_[b].lambda, dxs[b]));
      ad = std::min(ad, max_step(sc_[b].lambda, dss[b]));
    }
    ap = std::min(1.0, ap);
    ad = std::min(1.0, ad);
    double mu_aff = 0.0;
    {
      mu_aff = (pt_.xd + ap * pred.dxd).dot(pt_.sd + ad * pred.dsd);
      for (std::size_t b = 0; b < rhs.size(); ++b)
        mu_aff += (pt_.x[b] + ap * pred.dx[b]).cwiseProduct(pt_.s[b] + ad * pred.ds[b]).sum();
      mu_aff /= std::max(1, L_.order);
    }
    const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 0.0, 1.0);

    // Corrector: sigma mu I - Lambda^2 - sym(dX~ dS~).
    for (std::size_t b = 0; b < rhs.size(); ++b) {
      const MatrixXd cross = dxs[b] * dss[b];
      rhs[b] = sigma * mu * MatrixXd::Identity(L_.dense[b].n, L_.dense[b].n) - 0.5 * (cross + cross.transpose());
      rhs[b].diagonal() -= sc_[b].lambda.array().square().matrix();
    }
    const VectorXd rw = wd_.cwiseSqrt();
    rhs_d = (sigma * mu - lambda_d_.array().square() - (pred.dxd.cwiseQuotient(rw)).array() *
                                                           (pred.dsd.cwiseProduct(rw)).array())
                .matrix();
    const Direction corr = direction(rhs, rhs_d, rd, rdd, rp);

    ap = max_step_diag(pt_.xd, corr.dxd);
    ad = max_step_diag(pt_.sd, corr.dsd);
    for (std::size_t b = 0; b < rhs.size(); ++b) {
      ap = std::min(ap, max_step(sc_[b].lambda, sc_[b].rinv * corr.dx[b] * sc_[b].rinv.transpose()));
      ad = std::min(ad, max_step(sc_[b].lambda, sc_[b].r.transpose() * corr.ds[b] * sc_[b].r));
    }
    ap = std::min(1.0, 0.98 * ap);
    ad = std::min(1.0, 0.98 * ad);
    stalls = (ap < 1e-8 && ad < 1e-8) ? stalls + 1 : 0;

    pt_.y += ad * corr.dy;
    pt_.xd += ap * corr.dxd;
    pt_.sd += ad * corr.dsd;
    for (std::size_t b = 0; b < rhs.size(); ++b) {
      pt_.x[b] += ap * corr.dx[b];
      pt_.s[b] += ad * corr.ds[b];
      pt_.x[b] = 0.5 * (pt_.x[b] + pt_.x[b].transpose());
      pt_.s[b] = 0.5 * (pt_.s[b] + pt_.s[b].transpose());
    }
    if (!pt_.y.allFinite()) failed = true;
  }

  if (sol.status != SolveStatus::optimal) {
    double trace_x = pt_.xd.sum();
    for (const auto& x : pt_.x) trace_x += x.trace();
    if (gap <= loose && p_inf <= loose && d_inf <= loose) sol.status = SolveStatus::near_optimal;
    else if ((p_inf > 1e-3 && trace_x > 1e8) || (d_inf > 1e-3 && pt_.y.lpNorm<Eigen::Infinity>() > 1e8))
      sol.status = SolveStatus::infeasible;
    else sol.status = SolveStatus::numerical_failure;
  }

  sol.y.resize(L_.m + 1);
  sol.y[0] = 1.0;
  sol.y.tail(L_.m) = pt_.y;
  sol.objective = pobj;
  sol.gap = gap;
  sol.primal_residual = p_inf;
  sol.dual_residual = d_inf;
  out.x = pt_.x;
  out.s = pt_.s;
  out.x_diag = pt_.xd;
  out.s_diag = pt_.sd;
  return out;
}

}  // namespace

std::size_t solver_memory_estimate(const SdpProblem& problem) {
  double bytes = 16.0 * static_cast<double>(problem.nvar) * static_cast<double>(problem.nvar);
  for (const auto& b : problem.blocks) {
    bytes += 24.0 * static_cast<double>(b.entries.size());
    if (b.size > 1) bytes += 12.0 * 8.0 * static_cast<double>(b.size) * b.size;
  }
  return bytes > 1e18 ? static_cast<std::size_t>(1e18) : static_cast<std::size_t>(bytes);
}

SdpResult solve_detailed(const SdpProblem& problem, const SolverConfig& cfg) {
  cfg.check();
  const auto need = solver_memory_estimate(problem);
  if (need > cfg.memory_cap)
    throw MemoryCapError(need, cfg.memory_cap, "export the problem in SDPA format for an external solver");
  return Solver(problem, cfg).run();
}

MomentSolution solve(const SdpProblem& problem, const SolverConfig& cfg) {
  return solve_detailed(problem, cfg).solution;
}

}  // namespace framopt
