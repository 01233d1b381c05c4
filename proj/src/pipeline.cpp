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

#include "framopt/pipeline.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "framopt/model_io.hpp"

namespace framopt {

namespace {

using json = nlohmann::ordered_json;

std::string fixed(double v, const char* fmt) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

std::string RunManifest::to_json() const {
  json j;
  j["model"] = model;
  j["mode"] = to_string(mode);
  j["bound"] = bound ? json(*bound) : json("auto");
  j["method"] = to_string(method);
  j["order"] = order;
  j["sparsity"] = sparsity;
  j["solver"] = {{"backend", solver.backend == Backend::embedded ? "embedded" : "export"},
                 {"tolerance", solver.tolerance},
                 {"max_iterations", solver.max_iterations},
                 {"memory_cap", solver.memory_cap}};
  j["solution"] = solution ? json(solution->string()) : json(nullptr);
  j["out"] = out.string();
  j["svg"] = svg;
  j["seed"] = seed;
  return j.dump(2) + "\n";
}

Instance load_instance(const std::string& model, Mode mode, std::optional<double> bound) {
  Instance inst;
  inst.model = load_model(resolve_model_path(model));
  inst.coeffs = assemble(inst.model);
  inst.bounds = resolve_bounds(inst.model, inst.coeffs, mode, bound);
  inst.pop = build_pop(inst.model, inst.coeffs, mode, inst.bounds);
  return inst;
}

RunReport run(const RunManifest& manifest, const Instance& inst) {
  manifest.solver.check();
  RunReport rep;
  rep.model_name = inst.model.name;
  rep.mode = manifest.mode;
  rep.bounds = inst.bounds;
  const auto t0 = std::chrono::steady_clock::now();

  RelaxationPlan plan;
  try {
    plan = plan_relaxation(inst.pop, manifest.method, manifest.order, manifest.sparsity);
  } catch (const SparsityGuardError& ex) {
    rep.error = ex.what();
    rep.refused = true;
    return rep;
  }
  rep.signature = format_signature(plan.signature);
  rep.nvar = plan.nvar;
  rep.bytes = plan.bytes;

  // The exporter never forms the Schur complement.
  const bool exporting = manifest.solver.backend == Backend::exporter;
  const std::size_t schur = 8 * plan.nvar * plan.nvar;
  const std::size_t needed = exporting && plan.bytes > schur ? plan.bytes - schur : plan.bytes;
  if (needed > manifest.solver.memory_cap) {
    rep.error = MemoryCapError(needed, manifest.solver.memory_cap,
                               exporting ? "set FRAMOPT_MEMCAP to raise it"
                                         : "export the problem in SDPA format for an external solver")
                    .what();
    rep.refused = true;
    return rep;
  }

  Relaxation rel = assemble(inst.pop, plan);
  MomentSolution sol;
  try {
    if (exporting) {
      if (!manifest.out.empty()) {
        std::filesystem::create_directories(manifest.out);
        rep.sdpa_file = manifest.out / "problem.dat-s";
        export_sdpa(rel.sdp, *rep.sdpa_file);
      }
      if (!manifest.solution) {
        rep.seconds = seconds_since(t0);
        return rep;
      }
      sol = parse_solution(*manifest.solution, rel.sdp);
    } else {
      sol = solve(rel.sdp, manifest.solver);
    }
  } catch (const MemoryCapError& ex) {
    rep.error = ex.what();
    rep.refused = true;
    return rep;
  } catch (const std::runtime_error& ex) {
    rep.error = ex.what();
    return rep;
  }
  rep.seconds = seconds_since(t0);
  rep.status = sol.status;
  rep.iterations = sol.iterations;
  if (sol.status == SolveStatus::infeasible || sol.status == SolveStatus::numerical_failure) {
    rep.error = "solver finished with status " + to_string(sol.status);
    return rep;
  }
  rep.lower = sol.objective;

  const Eigen::VectorXd first = first_order_moments(rel.index, sol.y, inst.pop.n);
  CertificateReport cert = manifest.mode == Mode::compliance
                               ? compliance_upper_bound(inst.pop, inst.coeffs, first, sol.objective)
                               : weight_delta_star(inst.model, inst.pop, inst.coeffs, first, sol.objective);
  cert.flatness = flatness_check(rel, inst.pop, sol.y);
  rep.certificate = std::move(cert);
  return rep;
}

RunReport run(const RunManifest& manifest) {
  return run(manifest, load_instance(manifest.model, manifest.mode, manifest.bound));
}

std::string format_report(const RunReport& r) {
  std::ostringstream os;
  os << "model      " << r.model_name << "\n";
  os << "mode       " << to_string(r.mode) << "\n";
  os << "bounds     wbar " << fixed(r.bounds.wbar, "%.10g") << "  cbar " << fixed(r.bounds.cbar, "%.10g") << "\n";
  os << "structure  " << (r.signature.empty() ? kDash : r.signature) << "\n";
  os << "nvar       " << r.nvar << "\n";
  if (r.sdpa_file) os << "sdpa       " << r.sdpa_file->string() << "\n";
  if (r.status) os << "status     " << to_string(*r.status) << " after " << r.iterations << " iterations\n";
  os << "lower      " << (r.lower ? fixed(*r.lower, "%.10g") : kDash) << "\n";
  if (r.certificate) {
    const auto& c = *r.certificate;
    os << "upper      " << (c.upper ? fixed(*c.upper, "%.10g") : kDash) << "\n";
    os << "eps        " << (c.epsilon ? fixed(*c.epsilon, "%.3e") : kDash) << "\n";
    os << "eps_rel    " << (c.epsilon_rel ? fixed(*c.epsilon_rel, "%.3e") : kDash) << "\n";
    if (c.delta_star) os << "delta*     " << fixed(*c.delta_star, "%.10g") << "\n";
    if (c.flatness)
      os << "flatness   rank " << c.flatness->rank_r << " vs " << c.flatness->rank_rd << ", "
         << (c.flatness->holds ? "holds" : "does not hold") << "\n";
    else
      os << "flatness   not applicable\n";
    if (!c.note.empty()) os << "note       " << c.note << "\n";
  }
  if (!r.error.empty()) os << (r.refused ? "refused    " : "error      ") << r.error << "\n";
  return os.str();
}

std::string render_svg(const FrameModel& model, const Eigen::VectorXd& areas) {
  constexpr double width = 640.0, margin = 60.0, max_stroke = 14.0;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& n : model.nodes) {
    xmin = std::min(xmin, n.x);
    xmax = std::max(xmax, n.x);
    ymin = std::min(ymin, n.y);
    ymax = std::max(ymax, n.y);
  }
  const double span = std::max({xmax - xmin, ymax - ymin, 1e-12});
  const double scale = (width - 2 * margin) / span;
  const double height = (ymax - ymin) * scale + 2 * margin;
  auto px = [&](double x) { return margin + (x - xmin) * scale; };
  auto py = [&](double y) { return height - margin - (y - ymin) * scale; };
  const double amax = areas.size() ? areas.maxCoeff() : 0.0;

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(width, "%.0f") << "\" height=\""
     << fixed(height, "%.0f") << "\" viewBox=\"0 0 " << fixed(width, "%.0f") << ' ' << fixed(height, "%.0f")
     << "\">\n";
  os << "<defs><marker id=\"arrow\" markerWidth=\"8\" markerHeight=\"8\" refX=\"7\" refY=\"4\" orient=\"auto\">"
        "<path d=\"M0,0 L8,4 L0,8 z\" fill=\"#c0392b\"/></marker></defs>\n";
  for (std::size_t e = 0; e < model.elements.size(); ++e) {
    const double a = areas[static_cast<Eigen::Index>(e)];
    if (amax <= 0.0 || a < 1e-6 * amax) continue;
    const auto& el = model.elements[e];
    const auto& ni = model.nodes[static_cast<std::size_t>(el.node_i)];
    const auto& nj = model.nodes[static_cast<std::size_t>(el.node_j)];
    os << "<line x1=\"" << fixed(px(ni.x), "%.2f") << "\" y1=\"" << fixed(py(ni.y), "%.2f") << "\" x2=\""
       << fixed(px(nj.x), "%.2f") << "\" y2=\"" << fixed(py(nj.y), "%.2f") << "\" stroke=\"#222\" stroke-width=\""
       << fixed(max_stroke * a / amax, "%.3f") << "\" stroke-linecap=\"round\"/>\n";
  }
  for (const auto& s : model.supports) {
    const auto& n = model.nodes[static_cast<std::size_t>(s.node)];
    const double x = px(n.x), y = py(n.y);
    os << "<path d=\"M" << fixed(x, "%.2f") << ',' << fixed(y, "%.2f") << " l-9,16 h18 z\" fill=\"none\" stroke=\"#2c3e50\" "
       << "stroke-width=\"1.5\"/>\n";
  }
  for (const auto& l : model.loads) {
    const double fx = l.value[0], fy = l.value[1];
    const double mag = std::hypot(fx, fy);
    if (mag == 0.0) continue;
    const auto& n = model.nodes[static_cast<std::size_t>(l.node)];
    const double x = px(n.x), y = py(n.y);
    // Arrow ends at the node; screen y points down.
    const double dx = 40.0 * fx / mag, dy = -40.0 * fy / mag;
    os << "<line x1=\"" << fixed(x - dx, "%.2f") << "\" y1=\"" << fixed(y - dy, "%.2f") << "\" x2=\"" << fixed(x, "%.2f")
       << "\" y2=\"" << fixed(y, "%.2f") << "\" stroke=\"#c0392b\" stroke-width=\"2\" marker-end=\"url(#arrow)\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void write_outputs(const RunManifest& manifest, const Instance& inst, const RunReport& r) {
  std::filesystem::create_directories(manifest.out);
  write_text(manifest.out / "manifest.json", manifest.to_json());
  write_text(manifest.out / "report.txt", format_report(r));

  json j;
  j["model"] = r.model_name;
  j["mode"] = to_string(r.mode);
  j["wbar"] = r.bounds.wbar;
  j["cbar"] = r.bounds.cbar;
  j["structure"] = r.signature;
  j["nvar"] = r.nvar;
  j["lower"] = optional_number(r.lower);
  j["status"] = r.status ? json(to_string(*r.status)) : json(nullptr);
  j["iterations"] = r.iterations;
  j["seconds"] = r.seconds;
  if (r.certificate) {
    const auto& c = *r.certificate;
    json cj;
    cj["upper"] = optional_number(c.upper);
    cj["epsilon"] = optional_number(c.epsilon);
    cj["epsilon_rel"] = optional_number(c.epsilon_rel);
    cj["delta_star"] = optional_number(c.delta_star);
    cj["flatness"] = c.flatness ? json({{"rank_r", c.flatness->rank_r},
                                        {"rank_rd", c.flatness->rank_rd},
                                        {"holds", c.flatness->holds}})
                                : json(nullptr);
    cj["design"] = std::vector<double>(c.design.data(), c.design.data() + c.design.size());
    cj["note"] = c.note;
    j["certificate"] = cj;
  }
  j["error"] = r.error;
  j["refused"] = r.refused;
  write_text(manifest.out / "report.json", j.dump(2) + "\n");

  if (!r.certificate) return;
  const Eigen::VectorXd& design = r.certificate->design;
  std::ostringstream csv;
  csv << "element,node_i,node_j,area\n";
  for (std::size_t e = 0; e < inst.model.elements.size(); ++e) {
    const auto& el = inst.model.elements[e];
    csv << e + 1 << ',' << inst.model.nodes[static_cast<std::size_t>(el.node_i)].id << ','
        << inst.model.nodes[static_cast<std::size_t>(el.node_j)].id << ','
        << fixed(design[static_cast<Eigen::Index>(e)], "%.10g") << "\n";
  }
  write_text(manifest.out / "design.csv", csv.str());
  if (manifest.svg) write_text(manifest.out / "design.svg", render_svg(inst.model, design));
}

std::vector<TableRow> table_rows(const TableRequest& req) {
  std::vector<TableRow> rows;
  for (const auto& model : req.models) {
    std::optional<Instance> inst;
    std::string load_error;
    try {
      inst = load_instance(model, req.mode, req.bound);
    } catch (const std::exception& ex) {
      load_error = ex.what();
    }
    for (const Method method : req.methods) {
      TableRow row{model, to_string(method), kDash, kDash, kDash, kDash, kDash};
      if (!inst) {
        rows.push_back(row);
        continue;
      }
      RunManifest m;
      m.model = model;
      m.mode = req.mode;
      m.bound = req.bound;
      m.method = method;
      m.order = req.order;
      m.sparsity = req.sparsity;
      m.solver = req.solver;
      if (!req.solve) {
        try {
          const auto plan = plan_relaxation(inst->pop, method, req.order, req.sparsity);
          row.signature = format_signature(plan.signature);
          row.nvar = std::to_string(plan.nvar);
        } catch (const std::exception&) {
        }
        rows.push_back(row);
        continue;
      }
      try {
        const RunReport r = run(m, *inst);
        if (!r.signature.empty()) {
          row.signature = r.signature;
          row.nvar = std::to_string(r.nvar);
        }
        if (r.lower) {
          row.lower = fixed(*r.lower, "%.6g");
          row.time = fixed(r.seconds, "%.2f");
        }
        if (r.certificate && r.certificate->epsilon_rel) row.eps_rel = fixed(*r.certificate->epsilon_rel, "%.0e");
      } catch (const std::exception&) {
      }
      rows.push_back(row);
    }
  }
  return rows;
}

namespace {

// Code points, so the dash counts as one column.
std::size_t display_width(const std::string& s) {
  return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) { return (c & 0xC0) != 0x80; }));
}

}  // namespace

std::string format_table(const std::vector<TableRow>& rows, bool with_model) {
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> head = {"Method", "(n_c,s)", "nvar", "l.b.", "time", "eps_rel"};
  if (with_model) head.insert(head.begin(), "Model");
  cells.push_back(head);
  for (const auto& r : rows) {
    std::vector<std::string> c = {r.method, r.signature, r.nvar, r.lower, r.time, r.eps_rel};
    if (with_model) c.insert(c.begin(), r.model);
    cells.push_back(std::move(c));
  }
  std::vector<std::size_t> w(head.size(), 0);
  for (const auto& c : cells)
    for (std::size_t i = 0; i < c.size(); ++i) w[i] = std::max(w[i], display_width(c[i]));
  std::ostringstream os;
  for (const auto& c : cells) {
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (i) os << " | ";
      os << c[i];
      if (i + 1 < c.size()) os << std::string(w[i] - display_width(c[i]), ' ');
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace framopt
