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

#include <cstdio>
#include <fstream>
#include <sstream>
#include <tuple>

#include "framopt/sdp.hpp"

namespace framopt {

namespace {

std::string number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Line {
  int mat;
  int blk;
  int i;
  int j;
  double value;
};

}  // namespace

void write_sdpa(std::ostream& os, const SdpProblem& problem) {
  std::vector<int> sizes;
  std::vector<int> dense_no(problem.blocks.size(), 0);
  int diag = 0;
  for (std::size_t b = 0; b < problem.blocks.size(); ++b) {
    if (problem.blocks[b].size == 1) {
      ++diag;
      continue;
    }
    sizes.push_back(problem.blocks[b].size);
    dense_no[b] = static_cast<int>(sizes.size());
  }
  const int diag_no = static_cast<int>(sizes.size()) + 1;

  std::vector<Line> lines;
  int diag_row = 0;
  for (std::size_t b = 0; b < problem.blocks.size(); ++b) {
    const auto& blk = problem.blocks[b];
    const bool is_diag = blk.size == 1;
    if (is_diag) ++diag_row;
    for (const auto& e : blk.entries) {
      const double v = e.var == 0 ? -e.value : e.value;
      if (is_diag) lines.push_back({e.var, diag_no, diag_row, diag_row, v});
      else lines.push_back({e.var, dense_no[b], e.row + 1, e.col + 1, v});
    }
  }
  std::stable_sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) {
    return std::tie(a.mat, a.blk, a.i, a.j) < std::tie(b.mat, b.blk, b.i, b.j);
  });

  os << problem.nvar << '\n';
  os << sizes.size() + (diag > 0 ? 1 : 0) << '\n';
  for (std::size_t k = 0; k < sizes.size(); ++k) os << (k ? " " : "") << sizes[k];
  if (diag > 0) os << (sizes.empty() ? "" : " ") << -diag;
  os << '\n';
  std::vector<double> cost(problem.nvar, 0.0);
  for (const auto& [var, c] : problem.objective) cost[static_cast<std::size_t>(var - 1)] = c;
  for (std::size_t k = 0; k < cost.size(); ++k) os << (k ? " " : "") << number(cost[k]);
  os << '\n';
  for (const auto& l : lines)
    os << l.mat << ' ' << l.blk << ' ' << l.i << ' ' << l.j << ' ' << number(l.value) << '\n';
}

std::string to_sdpa(const SdpProblem& problem) {
  std::ostringstream os;
  write_sdpa(os, problem);
  return os.str();
}

void export_sdpa(const SdpProblem& problem, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_sdpa(out, problem);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

namespace {

// Content lines with comments (leading '"' or '*') dropped; SDPA allows
// "{", "}", "(", ")" and "," as separators.
std::vector<std::string> content_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '"' || line[first] == '*') continue;
    for (char& c : line)
      if (c == '{' || c == '}' || c == '(' || c == ')' || c == ',') c = ' ';
    out.push_back(line);
  }
  return out;
}

}  // namespace

SdpProblem parse_sdpa(const std::string& text) {
  const auto lines = content_lines(text);
  if (lines.size() < 4) throw SdpaFormatError("SDPA file is truncated");
  SdpProblem p;
  long long nvar = 0, nblocks = 0;
  {
    std::istringstream a(lines[0]), b(lines[1]);
    if (!(a >> nvar) || nvar < 0) throw SdpaFormatError("bad variable count");
    if (!(b >> nblocks) || nblocks < 0) throw SdpaFormatError("bad block count");
  }
  p.nvar = static_cast<std::size_t>(nvar);

  std::vector<int> sizes;
  {
    std::istringstream s(lines[2]);
    int v = 0;
    while (s >> v) sizes.push_back(v);
    if (static_cast<long long>(sizes.size()) != nblocks) throw SdpaFormatError("block size line does not match count");
  }
  {
    std::istringstream s(lines[3]);
    for (long long k = 1; k <= nvar; ++k) {
      double c = 0.0;
      if (!(s >> c)) throw SdpaFormatError("objective row is short");
      if (c != 0.0) p.objective.emplace_back(static_cast<int>(k), c);
    }
  }

  // Dense blocks keep their order; each diagonal block expands to 1x1s.
  std::vector<int> first(sizes.size() + 1, 0);
  for (std::size_t b = 0; b < sizes.size(); ++b) {
    if (sizes[b] == 0) throw SdpaFormatError("zero block size");
    first[b] = static_cast<int>(p.blocks.size());
    if (sizes[b] > 0) {
      SdpBlock blk;
      blk.size = sizes[b];
      p.blocks.push_back(std::move(blk));
    } else {
      for (int k = 0; k < -sizes[b]; ++k) {
        SdpBlock blk;
        blk.size = 1;
        p.blocks.push_back(std::move(blk));
      }
    }
  }

  for (std::size_t n = 4; n < lines.size(); ++n) {
    std::istringstream s(lines[n]);
    long long mat = 0, blk = 0, i = 0, j = 0;
    std::string value_text;
    if (!(s >> mat >> blk >> i >> j >> value_text)) throw SdpaFormatError("malformed entry line " + lines[n]);
    if (mat < 0 || mat > nvar || blk < 1 || blk > nblocks) throw SdpaFormatError("entry out of range: " + lines[n]);
    const int size = sizes[static_cast<std::size_t>(blk - 1)];
    const long long side = size > 0 ? size : -size;
    if (i < 1 || j < 1 || i > side || j > side) throw SdpaFormatError("entry index out of range: " + lines[n]);
    double value = 0.0;
    try {
      value = std::stod(value_text);
    } catch (const std::exception&) {
      throw SdpaFormatError("bad number in entry: " + lines[n]);
    }
    if (i > j) std::swap(i, j);
    if (mat == 0) value = -value;
    if (size > 0) {
      p.blocks[static_cast<std::size_t>(first[static_cast<std::size_t>(blk - 1)])].entries.push_back(
          {static_cast<int>(mat), static_cast<int>(i - 1), static_cast<int>(j - 1), value});
    } else {
      if (i != j) throw SdpaFormatError("off-diagonal entry in a diagonal block: " + lines[n]);
      p.blocks[static_cast<std::size_t>(first[static_cast<std::size_t>(blk - 1)] + i - 1)].entries.push_back(
          {static_cast<int>(mat), 0, 0, value});
    }
  }
  for (auto& blk : p.blocks)
    std::stable_sort(blk.entries.begin(), blk.entries.end(), [](const BlockEntry& a, const BlockEntry& b) {
      return std::tie(a.var, a.row, a.col) < std::tie(b.var, b.row, b.col);
    });
  return p;
}

SdpProblem read_sdpa(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_sdpa(buf.str());
}

MomentSolution parse_solution_text(const std::string& text, const SdpProblem& problem) {
  MomentSolution sol;
  sol.status = SolveStatus::optimal;
  std::string body = text;
  const auto at = text.find("xVec");
  if (at != std::string::npos) {
    const auto open = text.find('{', at);
    const auto close = open == std::string::npos ? open : text.find('}', open);
    if (close == std::string::npos) throw SdpaFormatError("xVec section is not closed");
    body = text.substr(open + 1, close - open - 1);
    const auto phase = text.find("phase.value");
    if (phase != std::string::npos) {
      const auto eol = text.find('\n', phase);
      const auto tag = text.substr(phase, eol == std::string::npos ? std::string::npos : eol - phase);
      if (tag.find("pdOPT") != std::string::npos) sol.status = SolveStatus::optimal;
      else if (tag.find("INF") != std::string::npos) sol.status = SolveStatus::infeasible;
      else if (tag.find("pdFEAS") != std::string::npos) sol.status = SolveStatus::near_optimal;
      else sol.status = SolveStatus::numerical_failure;
    }
  }
  for (char& c : body)
    if (c == ',') c = ' ';
  std::istringstream in(body);
  std::vector<double> values;
  std::string tok;
  while (in >> tok) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw SdpaFormatError("bad number '" + tok + "' in solution");
    } catch (const std::invalid_argument&) {
      throw SdpaFormatError("bad number '" + tok + "' in solution");
    } catch (const std::out_of_range&) {
      throw SdpaFormatError("number out of range '" + tok + "' in solution");
    }
  }
  if (values.size() != problem.nvar)
    throw SdpaFormatError("solution has " + std::to_string(values.size()) + " values, expected " +
                          std::to_string(problem.nvar));
  sol.y.resize(static_cast<Eigen::Index>(problem.nvar + 1));
  sol.y[0] = 1.0;
  for (std::size_t k = 0; k < values.size(); ++k) sol.y[static_cast<Eigen::Index>(k + 1)] = values[k];
  sol.objective = evaluate_objective(problem, sol.y);
  return sol;
}

MomentSolution parse_solution(const std::filesystem::path& path, const SdpProblem& problem) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open solution file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_solution_text(buf.str(), problem);
}

}  // namespace framopt
