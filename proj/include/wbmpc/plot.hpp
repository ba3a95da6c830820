/*
 Copyright 2026 The wbmpc Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "wbmpc/bench.hpp"

namespace wbmpc {

/// Stacked bars of per-phase iteration time normalized by the blind mean.
std::string report_svg(const BenchReport& report);

/// min_self_h and min_env_h over time, with reference lines at 0 and -epsilon.
std::string trace_svg(const std::vector<nlohmann::json>& records, double self_epsilon = 0.1);

std::vector<nlohmann::json> read_trace(const std::filesystem::path& path);

/// Dispatches on the input: a JSON report object or a line-delimited trace.
/// Returns the files written into `out_dir`.
std::vector<std::filesystem::path> render_plots(const std::filesystem::path& input,
                                                const std::filesystem::path& out_dir);

}  // namespace wbmpc
