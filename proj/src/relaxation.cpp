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

#include "framopt/relaxation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>
#include <tuple>

namespace framopt {

std::string to_string(Method method) {
  switch (method) {
    case Method::dense: return "dense";
    case Method::tsp_max: return "tsp-max";
    case Method::tsp_min: return "tsp-min";
    case Method::nmt: return "nmt";
    case Method::nmt_tsp: return "nmt-tsp";
  }
  return "?";
}

std::optional<Method> parse_method(const std::string& name) {
  for (auto m : {Method::dense, Method::tsp_max, Method::tsp_min, Method::nmt, Method::nmt_tsp})
    if (to_string(m) == name) return m;
  return std::nullopt;
}

BasisKind basis_kind(Method method) {
  return method == Method::nmt || method == Method::nmt_tsp ? BasisKind::nmt : BasisKind::standard;
}

bool uses_term_sparsity(Method method) {
  return method == Method::tsp_max || method == Method::tsp_min || method == Method::nmt_tsp;
}

ChordalKind chordal_kind(Method method) {
  return method == Method::tsp_max ? ChordalKind::maximal : ChordalKind::min_fill;
}

// ---- MomentIndex ----

MomentIndex::MomentIndex(int n) : n_(n) { id(Monomial::one(n)); }

int MomentIndex::id(const Monomial& m) {
  auto [it, inserted] = ids_.try_emplace(m, static_cast<int>(monomials_.size()));
  if (inserted) monomials_.push_back(m);
  return it->second;
}

std::optional<int> MomentIndex::find(const Monomial& m) const {
  auto it = ids_.find(m);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::vector<int> MomentIndex::canonicalize() {
  std::vector<int> order(monomials_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return GrlexLess{}(monomials_[static_cast<std::size_t>(a)], monomials_[static_cast<std::size_t>(b)]);
  });
  std::vector<int> remap(order.size());
  std::vector<Monomial> renumbered;
  renumbered.reserve(order.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    remap[static_cast<std::size_t>(order[pos])] = static_cast<int>(pos);
    renumbered.push_back(monomials_[static_cast<std::size_t>(order[pos])]);
  }
  monomials_ = std::move(renumbered);
  for (auto& [m, i] : ids_) i = remap[static_cast<std::size_t>(i)];
  return remap;
}

// ---- blocks ----

Signature signature(const SdpProblem& sdp) {
  std::map<int, std::size_t> counts;
  for (const auto& b : sdp.blocks) ++counts[b.size];
  Signature sig;
  for (const auto& [size, count] : counts) sig.emplace_back(count, size);
  return sig;
}

std::string format_signature(const Signature& sig) {
  std::ostringstream os;
  for (std::size_t i = 0; i < sig.size(); ++i) {
    if (i) os << ',';
    os << '(' << sig[i].first << ',' << sig[i].second << ')';
  }
  return os.str();
}

Eigen::MatrixXd evaluate(const SdpBlock& block, const Eigen::VectorXd& y) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(block.size, block.size);
  for (const auto& e : block.entries) {
    const double v = e.value * y[e.var];
    m(e.row, e.col) += v;
    if (e.row != e.col) m(e.col, e.row) += v;
  }
  return m;
}

double evaluate_objective(const SdpProblem& sdp, const Eigen::VectorXd& y) {
  double v = sdp.objective_constant;
  for (const auto& [var, c] : sdp.objective) v += c * y[var];
  return v;
}

namespace {

void normalize(std::vector<BlockEntry>& entries) {
  std::sort(entries.begin(), entries.end(), [](const BlockEntry& a, const BlockEntry& b) {
    return std::tie(a.var, a.row, a.col) < std::tie(b.var, b.row, b.col);
  });
  std::vector<BlockEntry> merged;
  merged.reserve(entries.size());
  for (const auto& e : entries) {
    if (!merged.empty() && merged.back().var == e.var && merged.back().row == e.row && merged.back().col == e.col)
      merged.back().value += e.value;
    else
      merged.push_back(e);
  }
  std::erase_if(merged, [](const BlockEntry& e) { return e.value == 0.0; });
  entries = std::move(merged);
}

PolyMatrixd unit(int n) { return PolyMatrixd::from_polynomial(Polynomiald::constant(n, 1.0)); }

}  // namespace

SdpBlock localizing_matrix(const PolyMatrixd& g, const std::vector<Monomial>& basis_sub, MomentIndex& index) {
  const int s = g.size();
  const int q = static_cast<int>(basis_sub.size());
  SdpBlock blk;
  blk.size = q * s;
  for (int a = 0; a < q; ++a)
    for (int b = a; b < q; ++b) {
      const Monomial ab = basis_sub[static_cast<std::size_t>(a)] * basis_sub[static_cast<std::size_t>(b)];
      for (const auto& [gamma, coeff] : g.terms()) {
        const int var = index.id(ab * gamma);
        for (int p = 0; p < s; ++p)
          for (int t = a == b ? p : 0; t < s; ++t) {
            const double c = coeff(p, t);
            if (c != 0.0) blk.entries.push_back({var, a * s + p, b * s + t, c});
          }
      }
    }
  normalize(blk.entries);
  return blk;
}

SdpBlock moment_matrix(const std::vector<Monomial>& basis_sub, MomentIndex& index) {
  return localizing_matrix(unit(index.n()), basis_sub, index);
}

// ---- memory cap ----

MemoryCapError::MemoryCapError(std::size_t estimate_, std::size_t cap_, const std::string& hint)
    : std::runtime_error("needs about " + std::to_string(estimate_ >> 20) + " MiB, above the " +
                         std::to_string(cap_ >> 20) + " MiB cap (" + hint + ")"),
      estimate(estimate_),
      cap(cap_) {}

std::optional<std::size_t> parse_byte_size(const std::string& text) {
  if (text.empty()) return std::nullopt;
  std::size_t pos = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &pos);
  } catch (const std::exception&) {
    return std::nullopt;
  }
  double scale = 1.0;
  if (pos < text.size()) {
    if (pos + 1 != text.size()) {
      // Allow a trailing "B" or "iB" after the unit letter.
      const auto tail = text.substr(pos + 1);
      if (tail != "B" && tail != "iB" && tail != "b") return std::nullopt;
    }
    switch (std::toupper(static_cast<unsigned char>(text[pos]))) {
      case 'K': scale = 1024.0; break;
      case 'M': scale = 1024.0 * 1024.0; break;
      case 'G': scale = 1024.0 * 1024.0 * 1024.0; break;
      case 'T': scale = 1024.0 * 1024.0 * 1024.0 * 1024.0; break;
      case 'B': scale = 1.0; break;
      default: return std::nullopt;
    }
  }
  if (!(value > 0.0)) return std::nullopt;
  return static_cast<std::size_t>(value * scale);
}

std::size_t memory_cap() {
  constexpr std::size_t kDefault = std::size_t{2} << 30;
  if (const char* env = std::getenv("FRAMOPT_MEMCAP")) {
    if (auto v = parse_byte_size(env)) return *v;
  }
  return kDefault;
}

// ---- planning and assembly ----

namespace {

const PolyMatrixd& constraint_of(const ScaledPop& pop, const PolyMatrixd& unit_g, int j) {
  return j == 0 ? unit_g : pop.constraints[static_cast<std::size_t>(j - 1)];
}

std::vector<Monomial> members_of(const Basis& basis, const std::vector<int>& members) {
  std::vector<Monomial> out;
  out.reserve(members.size());
  for (int i : members) out.push_back(basis[static_cast<std::size_t>(i)]);
  return out;
}

}  // namespace

RelaxationPlan plan_relaxation(const ScaledPop& pop, Method method, int r, int k) {
  const int needed = std::max(half_degree(pop.objective), [&] {
    int d = 0;
    for (const auto& g : pop.constraints) d = std::max(d, half_degree(g));
    return d;
  }());
  if (r < needed)
    throw std::invalid_argument("relaxation order " + std::to_string(r) + " is below the minimum " +
                                std::to_string(needed));

  RelaxationPlan plan;
  plan.method = method;
  plan.r = r;
  plan.k = uses_term_sparsity(method) ? k : 0;
  const BasisKind kind = basis_kind(method);
  const PolyMatrixd unit_g = unit(pop.n);
  const int m = static_cast<int>(pop.constraints.size());

  if (uses_term_sparsity(method)) {
    auto st = iterate(pop, r, kind, chordal_kind(method), k);
    if (st.stop == SparsityState::Stop::guard)
      throw SparsityGuardError("clique-explosion guard tripped at sparsity order " + std::to_string(st.k + 1) +
                               " (sum of squared clique sizes " + std::to_string(st.guard_load) + ")");
    for (int j = 0; j <= m; ++j) {
      const auto& cg = st.graphs[static_cast<std::size_t>(j)];
      plan.bases.push_back(cg.basis);
      const int s = constraint_of(pop, unit_g, j).size();
      int c = 0;
      for (auto& clique : maximal_cliques(cg.graph)) {
        const int side = static_cast<int>(clique.size()) * s;
        plan.blocks.push_back({j, c++, std::move(clique), side});
      }
    }
    plan.sparsity = std::move(st);
  } else {
    for (int j = 0; j <= m; ++j) {
      const auto& g = constraint_of(pop, unit_g, j);
      Basis b = make_basis(kind, pop.n, r - (j == 0 ? 0 : half_degree(g)));
      std::vector<int> all(b.size());
      for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
      plan.blocks.push_back({j, 0, std::move(all), static_cast<int>(b.size()) * g.size()});
      plan.bases.push_back(std::move(b));
    }
  }

  std::map<int, std::size_t> counts;
  double bytes = 0.0;
  for (const auto& blk : plan.blocks) {
    ++counts[blk.side];
    const auto& g = constraint_of(pop, unit_g, blk.constraint);
    double nnz = 0.0;
    for (const auto& [gamma, coeff] : g.terms()) nnz += static_cast<double>((coeff.array() != 0.0).count());
    const double q = static_cast<double>(blk.members.size());
    bytes += q * (q + 1) / 2.0 * nnz * static_cast<double>(sizeof(BlockEntry));
  }
  for (const auto& [size, count] : counts) plan.signature.emplace_back(count, size);

  if (method == Method::dense) {
    // Every monomial of degree <= 2r shows up in the moment matrix.
    plan.nvar = static_cast<std::size_t>(standard_basis_size(pop.n, 2 * r) - 1);
  } else {
    MonomialSet seen;
    for (const auto& [mono, c] : pop.objective.terms()) seen.insert(mono);
    for (const auto& blk : plan.blocks) {
      const auto& g = constraint_of(pop, unit_g, blk.constraint);
      const auto mons = members_of(plan.bases[static_cast<std::size_t>(blk.constraint)], blk.members);
      for (std::size_t a = 0; a < mons.size(); ++a)
        for (std::size_t b = a; b < mons.size(); ++b) {
          const Monomial ab = mons[a] * mons[b];
          for (const auto& [gamma, coeff] : g.terms()) seen.insert(ab * gamma);
        }
    }
    seen.insert(Monomial::one(pop.n));
    plan.nvar = seen.size() - 1;
  }
  // Any interior-point solve forms the dense nvar x nvar Schur complement.
  const double nv = static_cast<double>(plan.nvar);
  bytes += 8.0 * nv * nv;
  plan.bytes = bytes > 1e18 ? static_cast<std::size_t>(1e18) : static_cast<std::size_t>(bytes);
  return plan;
}

Relaxation assemble(const ScaledPop& pop, const RelaxationPlan& plan) {
  Relaxation rel{plan, {}, MomentIndex(pop.n)};
  const PolyMatrixd unit_g = unit(pop.n);
  for (const auto& pb : plan.blocks) {
    const auto mons = members_of(plan.bases[static_cast<std::size_t>(pb.constraint)], pb.members);
    SdpBlock blk = localizing_matrix(constraint_of(pop, unit_g, pb.constraint), mons, rel.index);
    blk.constraint = pb.constraint;
    blk.clique = pb.clique;
    rel.sdp.blocks.push_back(std::move(blk));
  }
  std::vector<std::pair<int, double>> objective;
  for (const auto& [mono, c] : pop.objective.terms()) objective.emplace_back(rel.index.id(mono), c);

  const auto remap = rel.index.canonicalize();
  for (auto& blk : rel.sdp.blocks) {
    for (auto& e : blk.entries) e.var = remap[static_cast<std::size_t>(e.var)];
    normalize(blk.entries);
  }
  for (auto& [var, c] : objective) {
    var = remap[static_cast<std::size_t>(var)];
    if (var == 0) rel.sdp.objective_constant += c;
    else rel.sdp.objective.emplace_back(var, c);
  }
  std::sort(rel.sdp.objective.begin(), rel.sdp.objective.end());
  rel.sdp.nvar = rel.index.nvar();
  return rel;
}

Relaxation assemble(const ScaledPop& pop, Method method, int r, int k, std::size_t cap) {
  auto plan = plan_relaxation(pop, method, r, k);
  if (plan.bytes > cap) throw MemoryCapError(plan.bytes, cap);
  return assemble(pop, plan);
}

Eigen::VectorXd dirac_moments(const MomentIndex& index, const Eigen::VectorXd& x) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(index.size()));
  for (std::size_t i = 0; i < index.size(); ++i)
    y[static_cast<Eigen::Index>(i)] = monomial_value<double>(index.monomial(static_cast<int>(i)), x);
  return y;
}

Eigen::VectorXd first_order_moments(const MomentIndex& index, const Eigen::VectorXd& y, int count) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(count);
  for (int i = 0; i < count; ++i)
    if (auto id = index.find(Monomial::variable(index.n(), i))) out[i] = y[*id];
  return out;
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::near_optimal: return "near-optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::numerical_failure: return "numerical-failure";
  }
  return "?";
}

// ---- ladder ----

Ladder lower_bound_ladder(const ScaledPop& pop, std::span<const int> orders, Method method,
                          std::span<const int> sparsity_orders, const SdpSolver& solve) {
  Ladder ladder;
  auto run = [&](Method m, int r, int k) {
    LadderCell cell{m, r, k, std::nullopt, {}};
    try {
      const auto rel = assemble(pop, m, r, k);
      const auto sol = solve(rel.sdp);
      if (sol.status == SolveStatus::optimal || sol.status == SolveStatus::near_optimal) cell.bound = sol.objective;
      else cell.error = to_string(sol.status);
    } catch (const std::exception& ex) {
      cell.error = ex.what();
    }
    ladder.cells.push_back(std::move(cell));
    return ladder.cells.size() - 1;
  };
  auto check = [&](std::size_t lo, std::size_t hi) {
    const auto& a = ladder.cells[lo].bound;
    const auto& b = ladder.cells[hi].bound;
    if (!a || !b) return;
    if (*a > *b + 1e-6 * (1.0 + std::abs(*b))) ladder.violations.emplace_back(lo, hi);
  };

  const Method dense = basis_kind(method) == BasisKind::nmt ? Method::nmt : Method::dense;
  std::optional<std::size_t> previous_dense;
  for (int r : orders) {
    std::optional<std::size_t> previous;
    if (uses_term_sparsity(method)) {
      for (int k : sparsity_orders) {
        const auto cell = run(method, r, k);
        if (previous) check(*previous, cell);
        previous = cell;
      }
    }
    const auto top = run(dense, r, 0);
    if (previous) check(*previous, top);
    if (previous_dense) check(*previous_dense, top);
    previous_dense = top;
  }
  return ladder;
}

}  // namespace framopt
