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

#include <cstddef>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "asymforge/measures.hpp"
#include "asymforge/varopt.hpp"

namespace asymforge::cli {

/// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitViolations = 1;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitNumerical = 3;

/// Runs the command line `args` (without the program name). Machine-readable
/// results go to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Worker count for `jobs` independent tasks: hardware concurrency, capped
/// by ASYMFORGE_THREADS when set to a positive integer.
std::size_t worker_count(std::size_t jobs);

/// Runs task(i) for i in [0, n) on the worker pool. Exceptions are rethrown
/// after all workers stop, lowest index first.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& task);

nlohmann::json to_json(const MeasureValue& v);
nlohmann::json to_json(const EstimationReport& r);

}  // namespace asymforge::cli
