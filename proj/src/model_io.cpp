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

#include "framopt/model_io.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#ifndef FRAMOPT_MODEL_DIR
#define FRAMOPT_MODEL_DIR "models"
#endif

namespace framopt {

using nlohmann::json;

namespace {

std::array<bool, 3> parse_fix(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "clamped") return {true, true, true};
    if (s == "hinged") return {true, true, false};
    throw ModelError("unknown support shorthand '" + s + "'");
  }
  std::array<bool, 3> fixed{};
  for (const auto& d : j) {
    const auto s = d.get<std::string>();
    if (s == "ux") fixed[0] = true;
    else if (s == "uy") fixed[1] = true;
    else if (s == "rz") fixed[2] = true;
    else throw ModelError("unknown DOF name '" + s + "'");
  }
  return fixed;
}

}  // namespace

FrameModel parse_model(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& ex) {
    throw ModelError(std::string("model file is not valid JSON: ") + ex.what());
  }
  if (doc.value("format", "") != "framopt-model") throw ModelError("not a framopt-model document");
  const int version = doc.value("version", 0);
  if (version != kModelFormatVersion)
    throw ModelError("unsupported model format version " + std::to_string(version));

  try {
    FrameModel m;
    m.name = doc.value("name", "");
    m.notes = doc.value("notes", "");
    const auto& mat = doc.at("material");
    m.young = mat.at("E").get<double>();
    const double density = mat.value("density", 1.0);

    for (const auto& n : doc.at("nodes"))
      m.nodes.push_back({n.at("id").get<std::string>(), n.at("x").get<double>(), n.at("y").get<double>()});

    for (const auto& s : doc.at("sections")) {
      const auto id = s.at("id").get<std::string>();
      const auto kind_name = s.at("kind").get<std::string>();
      auto kind = parse_section_kind(kind_name);
      if (!kind) throw ModelError("section '" + id + "' has unknown kind '" + kind_name + "'");
      m.sections.emplace(id, make_section(id, *kind, s.at("params").get<std::vector<double>>()));
    }

    for (const auto& e : doc.at("elements")) {
      Element el;
      const auto ends = e.at("nodes").get<std::vector<std::string>>();
      if (ends.size() != 2) throw ModelError("element must list exactly two nodes");
      el.node_i = m.node_index(ends[0]);
      el.node_j = m.node_index(ends[1]);
      el.section = e.at("section").get<std::string>();
      el.density = e.value("density", density);
      m.elements.push_back(el);
    }

    for (const auto& s : doc.at("supports"))
      m.supports.push_back({m.node_index(s.at("node").get<std::string>()), parse_fix(s.at("fix"))});

    for (const auto& l : doc.at("loads")) {
      NodalLoad load;
      load.node = m.node_index(l.at("node").get<std::string>());
      load.value = {l.value("fx", 0.0), l.value("fy", 0.0), l.value("m", 0.0)};
      m.loads.push_back(load);
    }

    if (doc.contains("groups")) {
      for (const auto& g : doc.at("groups")) {
        std::vector<int> members;
        for (int e : g.get<std::vector<int>>()) members.push_back(e - 1);
        m.groups.push_back(std::move(members));
      }
    }
    if (doc.contains("bounds")) {
      const auto& b = doc.at("bounds");
      if (b.contains("wbar")) m.wbar = b.at("wbar").get<double>();
      if (b.contains("cbar")) m.cbar = b.at("cbar").get<double>();
    }
    if (doc.contains("options")) {
      const auto& o = doc.at("options");
      if (o.contains("area_cap")) m.area_cap = o.at("area_cap").get<double>();
      m.bound_compliance_variable = o.value("bound_compliance_variable", true);
    }
    return m;
  } catch (const json::exception& ex) {
    throw ModelError(std::string("malformed model document: ") + ex.what());
  }
}

FrameModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open model file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

std::string dump_model(const FrameModel& m) {
  json doc;
  doc["format"] = "framopt-model";
  doc["version"] = kModelFormatVersion;
  doc["name"] = m.name;
  if (!m.notes.empty()) doc["notes"] = m.notes;
  doc["material"] = {{"E", m.young}};
  for (const auto& n : m.nodes) doc["nodes"].push_back({{"id", n.id}, {"x", n.x}, {"y", n.y}});
  for (const auto& [id, s] : m.sections)
    doc["sections"].push_back({{"id", id}, {"kind", to_string(s.kind)}, {"params", s.params}});
  for (const auto& e : m.elements)
    doc["elements"].push_back({{"nodes", {m.nodes[static_cast<std::size_t>(e.node_i)].id,
                                          m.nodes[static_cast<std::size_t>(e.node_j)].id}},
                               {"section", e.section},
                               {"density", e.density}});
  for (const auto& s : m.supports) {
    json fix = json::array();
    const char* names[3] = {"ux", "uy", "rz"};
    for (int k = 0; k < 3; ++k)
      if (s.fixed[static_cast<std::size_t>(k)]) fix.push_back(names[k]);
    doc["supports"].push_back({{"node", m.nodes[static_cast<std::size_t>(s.node)].id}, {"fix", fix}});
  }
  for (const auto& l : m.loads)
    doc["loads"].push_back({{"node", m.nodes[static_cast<std::size_t>(l.node)].id},
                            {"fx", l.value[0]},
                            {"fy", l.value[1]},
                            {"m", l.value[2]}});
  for (const auto& g : m.groups) {
    json members = json::array();
    for (int e : g) members.push_back(e + 1);
    doc["groups"].push_back(members);
  }
  if (m.wbar) doc["bounds"]["wbar"] = *m.wbar;
  if (m.cbar) doc["bounds"]["cbar"] = *m.cbar;
  if (m.area_cap) doc["options"]["area_cap"] = *m.area_cap;
  if (!m.bound_compliance_variable) doc["options"]["bound_compliance_variable"] = false;
  return doc.dump(2) + "\n";
}

std::filesystem::path bundled_model_dir() {
  if (const char* env = std::getenv("FRAMOPT_MODEL_DIR")) return env;
  return FRAMOPT_MODEL_DIR;
}

std::filesystem::path resolve_model_path(const std::string& name_or_path) {
  std::filesystem::path p(name_or_path);
  if (std::filesystem::exists(p)) return p;
  auto bundled = bundled_model_dir() / (name_or_path + ".json");
  if (std::filesystem::exists(bundled)) return bundled;
  throw ModelError("no model file or bundled model named '" + name_or_path + "'");
}

}  // namespace framopt
