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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wbmpc/ocp.hpp"

namespace wbmpc {

struct StrategyStats {
  std::string name;   // a, b, c, d, blind, esdf_spheres, primitives_vs_occupancy
  std::string label;  // human readable
  std::size_t samples = 0;
  double mean_ms = 0.0;
  double median_ms = 0.0;
  double p95_ms = 0.0;
  PhaseTimes phase_mean;
  double ratio = 0.0;  // mean_ms over the blind mean
  bool aborted = false;
};

struct BenchReport {
  std::string kind;  // "self" or "env"
  int runs = 0;
  int iterations = 0;
  int warmup = 0;
  std::vector<StrategyStats> entries;

  const StrategyStats& at(const std::string& name) const;
  nlohmann::json to_json() const;
  static BenchReport from_json(const nlohmann::json& document);
};

struct BenchOptions {
  std::vector<std::string> strategies;  // empty: all
  int runs = 5;
  int iterations = 1000;  // measured MPC iterations per run
  int warmup = 50;        // leading iterations excluded from the statistics
  std::uint64_t seed = 0;
  std::filesystem::path scenario;  // defaults to the shipped bench fixture
  std::function<void(const std::string&)> progress;
};

/// Strategies a-d: detailed naive, detailed broad-phase, simplified naive,
/// simplified broad-phase; the blind run is always added for normalization.
BenchReport bench_self(const BenchOptions& options);

/// Methods esdf_spheres, primitives_vs_occupancy and blind.
BenchReport bench_env(const BenchOptions& options);

/// Per-iteration statistics over a set of timed records.
StrategyStats summarize(const std::string& name, const std::string& label,
                        const std::vector<PhaseTimes>& samples);

}  // namespace wbmpc
