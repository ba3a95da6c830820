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
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "wbmpc/collision_model.hpp"
#include "wbmpc/esdf.hpp"
#include "wbmpc/kinematics.hpp"
#include "wbmpc/ocp.hpp"
#include "wbmpc/whole_body_cost.hpp"

namespace wbmpc {

/// Everything needed to run one closed-loop planning experiment.
struct Scenario {
  std::string name;
  std::filesystem::path detailed_path;
  std::filesystem::path simplified_path;
  std::filesystem::path robot_path;  // the one selected by `model`
  std::filesystem::path sphere_robot_path;  // the simplified model: its sphere sources feed the env terms
  std::optional<std::filesystem::path> scene_path;

  std::string self_strategy = "off";  // naive | broadphase | off
  std::string model = "simplified";   // detailed | simplified
  std::string env = "off";            // esdf | primitives | off

  double horizon = 1.0;
  int nodes = 20;
  double rate = 70.0;
  double duration = 5.0;
  Configuration initial;
  double initial_noise = 0.0;  // std-dev added to the initial joints (rad)
  double ee_tolerance = 0.05;

  nlohmann::json cost_document;  // parsed lazily against the loaded robot

  void set_model(const std::string& model);

  static Scenario from_json(const nlohmann::json& document, const std::filesystem::path& base_dir);
  static Scenario load(const std::filesystem::path& path);
};

/// Robot, collision model, sphere set, map and cost assembled from a scenario.
class ScenarioInstance {
 public:
  explicit ScenarioInstance(const Scenario& scenario);
  ScenarioInstance(const ScenarioInstance&) = delete;
  ScenarioInstance& operator=(const ScenarioInstance&) = delete;

  const Scenario& scenario() const { return scenario_; }
  const RobotModel& robot() const { return robot_; }
  const CollisionModelSpec& collision() const { return collision_; }
  const SphereSet& spheres() const { return spheres_; }
  const std::vector<SphereSource>& env_bodies() const { return env_bodies_; }
  const std::optional<Scene>& scene() const { return scene_; }
  std::shared_ptr<const EsdfGrid> esdf() const { return esdf_; }
  WholeBodyCost& cost() { return *cost_; }
  const WholeBodyDynamics& dynamics() const { return dynamics_; }
  OcpProblem problem() const;

  /// Moves the obstacles to time t and refreshes the field incrementally.
  void advance_environment(double t);
  int environment_updates() const { return env_updates_; }

  VectorXd initial_state(std::uint64_t seed) const;

 private:
  Scenario scenario_;
  RobotModel robot_;
  CollisionModelSpec collision_;
  SphereSet spheres_;
  std::vector<SphereSource> env_bodies_;
  std::optional<Scene> scene_;
  std::shared_ptr<const EsdfGrid> esdf_;
  bool moving_ = false;
  int env_updates_ = 0;
  WholeBodyDynamics dynamics_;
  std::unique_ptr<WholeBodyCost> cost_;
};

/// Builds the cost settings from the scenario's "cost" member.
CostSpec cost_spec_from_json(const nlohmann::json& cost, const Scenario& scenario,
                             const RobotModel& robot);

struct ScenarioResult {
  MpcTrace trace;
  double ee_error = 0.0;        // final distance to the last end-effector target
  double min_self_distance = std::numeric_limits<double>::quiet_NaN();  // min d = h + epsilon
  double min_env_h = std::numeric_limits<double>::quiet_NaN();
  int env_updates = 0;
};

struct RunOptions {
  std::uint64_t seed = 0;
  std::ostream* trace_out = nullptr;  // line-delimited records when set
  std::optional<double> duration;     // overrides the scenario duration
};

ScenarioResult run_scenario(const Scenario& scenario, const RunOptions& options = {});

nlohmann::json record_to_json(const MpcRecord& record);

}  // namespace wbmpc
