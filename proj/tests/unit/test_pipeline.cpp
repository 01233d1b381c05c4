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

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "framopt/pipeline.hpp"

using namespace framopt;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int count(const std::string& text, const std::string& needle) {
  int n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("empty method list gives a header-only table") {
  TableRequest req;
  req.models = {"illustrative"};
  const auto rows = table_rows(req);
  CHECK(rows.empty());
  const auto text = format_table(rows, false);
  CHECK(count(text, "\n") == 1);
  CHECK(text.rfind("Method", 0) == 0);
}

TEST_CASE("unavailable cells print as a dash and align by code points") {
  std::vector<TableRow> rows = {{"m", "dense", "(3,1)", "9", kDash, kDash, kDash},
                                {"m", "nmt-tsp", kDash, kDash, "0.1", "1.00", "1e-08"}};
  const auto text = format_table(rows, true);
  std::istringstream in(text);
  std::string line;
  std::vector<std::size_t> bars;
  while (std::getline(in, line)) {
    // Columns line up when every row puts its separators at the same code point.
    std::size_t cp = 0, first = 0;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if ((line[i] & 0xC0) == 0x80) continue;
      if (line[i] == '|' && first == 0) first = cp;
      ++cp;
    }
    bars.push_back(first);
  }
  REQUIRE(bars.size() == 3);
  CHECK(bars[0] == bars[1]);
  CHECK(bars[1] == bars[2]);
  CHECK(count(text, kDash) == 5);
}

TEST_CASE("structure-only table rows are deterministic") {
  TableRequest req;
  req.models = {"illustrative"};
  req.methods = {Method::dense, Method::tsp_min, Method::nmt};
  req.order = 2;
  req.solve = false;
  const auto a = format_table(table_rows(req), false);
  CHECK(a == format_table(table_rows(req), false));
  CHECK(count(a, "\n") == 4);
}

TEST_CASE("unknown model in a table yields dash rows") {
  TableRequest req;
  req.models = {"no_such_model"};
  req.methods = {Method::dense};
  const auto rows = table_rows(req);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].nvar == kDash);
}

TEST_CASE("manifest JSON records every field") {
  RunManifest m;
  m.model = "illustrative";
  m.method = Method::nmt_tsp;
  m.order = 2;
  m.seed = 7;
  const auto j = nlohmann::json::parse(m.to_json());
  CHECK(j["model"] == "illustrative");
  CHECK(j["method"] == "nmt-tsp");
  CHECK(j["bound"] == "auto");
  CHECK(j["order"] == 2);
  CHECK(j["seed"] == 7);
  CHECK(j["solver"]["backend"] == "embedded");
  CHECK(j["solution"].is_null());
}

TEST_CASE("run writes outputs and repeats exactly") {
  const auto dir = std::filesystem::temp_directory_path() / "framopt_pipeline_test";
  std::filesystem::remove_all(dir);
  RunManifest m;
  m.model = "illustrative";
  m.mode = Mode::weight;
  m.order = 2;
  m.out = dir;
  m.svg = true;
  const Instance inst = load_instance(m.model, m.mode, m.bound);
  const RunReport r = run(m, inst);
  REQUIRE(r.error.empty());
  REQUIRE(r.lower.has_value());
  CHECK(*r.lower == doctest::Approx(std::sqrt(2.0) / 20).epsilon(1e-6));
  write_outputs(m, inst, r);
  for (const char* f : {"manifest.json", "report.txt", "report.json", "design.csv", "design.svg"})
    CHECK(std::filesystem::exists(dir / f));

  const RunReport again = run(m, inst);
  CHECK(*again.lower == *r.lower);
  CHECK(again.certificate->design == r.certificate->design);

  const auto j = nlohmann::json::parse(slurp(dir / "report.json"));
  CHECK(j["certificate"]["flatness"]["holds"] == true);
  std::filesystem::remove_all(dir);
}

TEST_CASE("svg leaves out vanishing elements") {
  const Instance inst = load_instance("illustrative", Mode::weight, std::nullopt);
  const auto all = render_svg(inst.model, Eigen::Vector3d(0.1, 0.1, 0.1));
  const auto one = render_svg(inst.model, Eigen::Vector3d(1e-9, 0.0, 0.1));
  CHECK(count(all, "stroke=\"#222\"") == 3);
  CHECK(count(one, "stroke=\"#222\"") == 1);
}

TEST_CASE("memory-cap refusal is reported, not thrown") {
  RunManifest m;
  m.model = "frame21";
  m.mode = Mode::compliance;
  m.order = 3;
  m.solver.memory_cap = 1 << 20;
  const RunReport r = run(m);
  CHECK(r.refused);
  CHECK_FALSE(r.lower.has_value());
  CHECK(r.error.find("SDPA") != std::string::npos);
}
