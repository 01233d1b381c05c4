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

#include <filesystem>
#include <string>

#include "framopt/frame.hpp"

namespace framopt {

inline constexpr int kModelFormatVersion = 1;

// JSON model document: {"format": "framopt-model", "version": 1, "nodes",
// "elements", "sections", "supports", "loads", "groups", ...}.
FrameModel parse_model(const std::string& text);
FrameModel load_model(const std::filesystem::path& path);
std::string dump_model(const FrameModel& model);

// Resolves a bundled model name (e.g. "illustrative") or a file path.
std::filesystem::path resolve_model_path(const std::string& name_or_path);
std::filesystem::path bundled_model_dir();

}  // namespace framopt
