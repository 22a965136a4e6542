// Copyright 2026 The asymforge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// State/observable file format:
//   {"dim": d, "matrix": [[[re, im], ...d entries], ...d rows]}

#include <filesystem>
#include <string>

#include <json.hpp>

#include "asymforge/matcore.hpp"

namespace asymforge::io {

/// Throws ParseError naming the offending row/column on ragged or
/// non-finite input.
ComplexMatrix matrix_from_json(const nlohmann::json& j);
nlohmann::json matrix_to_json(const ComplexMatrix& m);

ComplexMatrix parse_matrix(const std::string& text);
ComplexMatrix load_matrix(const std::filesystem::path& path);
void save_matrix(const std::filesystem::path& path, const ComplexMatrix& m);

}  // namespace asymforge::io
