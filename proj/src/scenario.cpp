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
#include "wbmpc/scenario.hpp"

#include <cmath>
#include <ostream>
#include <random>

#include "json_util.hpp"

namespace wbmpc {

using nlohmann::json;

namespace {

const std::string kCtx = "scenario";

Configuration configuration_from_json(const json& j, const std::string& ctx) {
  Configuration q;
  if (j.contains("base")) q.base = json_util::pose(j.at("base"), ctx + ".base");
  q.joints = json_util::vector(json_util::require(j, "joints", ctx), ctx + ".joints");
  return q;
}

std::string one_of(const json& obj, const std::string& key, const std::string& fallback,
                   std::initializer_list<const char*> allowed, const std::string& ctx) {
  const std::string v = json_util::get_or<std::string>(obj, key, fallback, ctx);
  for (const char* a : allowed)
    if (v == a) return v;
  std::string list;
  for (const char* a : allowed) list += std::string(list.empty() ? "" : "|") + a;
  throw ModelError(ctx + ": field '" + key + "' must be one of " + list + ", got '" + v + "'");
}

// A scalar, or a list of exactly n diagonal entries.
VectorXd diagonal(const json& v, int n, const std::string& ctx) {
  if (v.is_number()) return VectorXd::Constant(n, v.get<double>());
  const VectorXd d = json_util::vector(v, ctx);
  if (d.size() != n)
    throw ModelError(ctx + ": expected " + std::to_string(n) + " entries, got " + std::to_string(d.size()));
  return d;
}

VectorXd blocks(const json& obj, const char* k0, const char* k1, const char* k2, int n_joints,
                const std::string& ctx) {
  VectorXd d(6 + n_joints);
  d.head<3>() = diagonal(json_util::require(obj, k0, ctx), 3, ctx + "." + k0);
  d.segment<3>(3) = diagonal(json_util::require(obj, k1, ctx), 3, ctx + "." + k1);
  d.tail(n_joints) = diagonal(json_util::require(obj, k2, ctx), n_joints, ctx + "." + k2);
  return d;
}

bool flag(const json& obj, const std::string& key, bool fallback, const std::string& ctx) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_number_integer() && (v.get<int>() == 0 || v.get<int>() == 1)) return v.get<int>() == 1;
  throw ModelError(ctx + ": field '" + key + "' must be 0 or 1");
}

}  // namespace

Scenario Scenario::from_json(const json& doc, const std::filesystem::path& base_dir) {
  Scenario s;
  s.name = json_util::get_or<std::string>(doc, "name", "scenario", kCtx);

  const json& strategy = json_util::require(doc, "strategy", kCtx);
  s.self_strategy = one_of(strategy, "self", "off", {"naive", "broadphase", "off"}, kCtx + ".strategy");
  s.model = one_of(strategy, "model", "simplified", {"detailed", "simplified"}, kCtx + ".strategy");
  s.env = one_of(strategy, "env", "off", {"esdf", "primitives", "off"}, kCtx + ".strategy");

  const json& robot = json_util::require(doc, "robot", kCtx);
  const auto path_of = [&](const std::string& key) {
    return base_dir / json_util::get<std::string>(robot, key, kCtx + ".robot");
  };
  s.detailed_path = path_of("detailed");
  s.simplified_path = path_of("simplified");
  s.set_model(s.model);
  if (doc.contains("scene")) s.scene_path = base_dir / json_util::get<std::string>(doc, "scene", kCtx);
  if (s.env != "off" && !s.scene_path)
    throw ModelError(kCtx + ": field 'scene' is required when strategy.env is '" + s.env + "'");

  s.horizon = json_util::get_or<double>(doc, "horizon", 1.0, kCtx);
  s.nodes = json_util::get_or<int>(doc, "nodes", 20, kCtx);
  s.rate = json_util::get_or<double>(doc, "rate", 70.0, kCtx);
  s.duration = json_util::get_or<double>(doc, "duration", 5.0, kCtx);
  if (!(s.horizon > 0.0)) throw ModelError(kCtx + ": field 'horizon' must be > 0");
  if (s.nodes < 2) throw ModelError(kCtx + ": field 'nodes' must be >= 2");
  if (!(s.rate > 0.0)) throw ModelError(kCtx + ": field 'rate' must be > 0");
  if (!(s.duration >= 0.0)) throw ModelError(kCtx + ": field 'duration' must be >= 0");
  s.initial = configuration_from_json(json_util::require(doc, "initial", kCtx), kCtx + ".initial");
  s.initial_noise = json_util::get_or<double>(doc, "initial_noise", 0.0, kCtx);
  if (doc.contains("goal")) s.ee_tolerance = json_util::get_or<double>(doc.at("goal"), "ee_tolerance", 0.05, kCtx + ".goal");

  s.cost_document = {{"cost", json_util::require(doc, "cost", kCtx)},
                     {"self_collision", doc.value("self_collision", json::object())},
                     {"environment", doc.value("environment", json::object())}};
  if (!s.cost_document["cost"].is_object()) throw ModelError(kCtx + ": field 'cost' must be an object");
  return s;
}

void Scenario::set_model(const std::string& m) {
  if (m != "detailed" && m != "simplified") throw ModelError("model must be detailed or simplified");
  model = m;
  robot_path = m == "detailed" ? detailed_path : simplified_path;
  sphere_robot_path = simplified_path;
}

Scenario Scenario::load(const std::filesystem::path& path) {
  return from_json(json_util::read_file(path), path.parent_path());
}

CostSpec cost_spec_from_json(const json& doc, const Scenario& scenario, const RobotModel& robot) {
  const std::string ctx = kCtx + ".cost";
  const json& c = doc.at("cost");
  const int nj = robot.num_joints();
  CostSpec spec;
  spec.alpha1 = flag(c, "alpha1", true, ctx);
  spec.alpha2 = flag(c, "alpha2", true, ctx);
  if (c.contains("Q_ee")) spec.Q_ee = diagonal(c.at("Q_ee"), 3, ctx + ".Q_ee").asDiagonal();
  spec.Q_r = blocks(json_util::require(c, "Q_r", ctx), "base_position", "base_orientation", "joints",
                    nj, ctx + ".Q_r")
                 .asDiagonal();
  spec.R = blocks(json_util::require(c, "R", ctx), "base_linear", "base_angular", "joints", nj,
                  ctx + ".R")
               .asDiagonal();
  spec.terminal_weight = json_util::get_or<double>(c, "terminal_weight", 1.0, ctx);
  spec.terminal_collision_weight = scenario.horizon / scenario.nodes;
  if (c.contains("ee_reference")) {
    for (const auto& w : c.at("ee_reference")) {
      spec.ee_reference.push_back({json_util::get<double>(w, "t", ctx + ".ee_reference[]"),
                                   json_util::vec3(json_util::require(w, "position", ctx + ".ee_reference[]"),
                                                   ctx + ".ee_reference[].position")});
    }
    std::stable_sort(spec.ee_reference.begin(), spec.ee_reference.end(),
                     [](const EeWaypoint& a, const EeWaypoint& b) { return a.t < b.t; });
  }
  spec.x_ref = c.contains("x_ref") ? configuration_from_json(c.at("x_ref"), ctx + ".x_ref") : scenario.initial;
  spec.u_ref = c.contains("u_ref") ? diagonal(c.at("u_ref"), robot.tangent_size(), ctx + ".u_ref")
                                   : VectorXd::Zero(robot.tangent_size());
  if (spec.x_ref.joints.size() != nj)
    throw ModelError(ctx + ".x_ref: field 'joints' must have " + std::to_string(nj) + " entries");

  const json& self = doc.at("self_collision");
  spec.self_enabled = scenario.self_strategy != "off";
  if (spec.self_enabled) spec.self.strategy = parse_self_strategy(scenario.self_strategy);
  spec.self.epsilon = json_util::get_or<double>(self, "epsilon", 0.1, kCtx + ".self_collision");
  spec.self_rbf.mu = json_util::get_or<double>(self, "mu", 1e-2, kCtx + ".self_collision");
  spec.self_rbf.delta = json_util::get_or<double>(self, "delta", 1e-3, kCtx + ".self_collision");

  const json& env = doc.at("environment");
  spec.env = parse_env_mode(scenario.env);
  spec.env_rbf.mu = json_util::get_or<double>(env, "mu", 0.5, kCtx + ".environment");
  spec.env_rbf.delta = json_util::get_or<double>(env, "delta", 0.02, kCtx + ".environment");
  spec.env_epsilon = json_util::get_or<double>(env, "epsilon", 0.0, kCtx + ".environment");
  for (const RbfParams& p : {spec.self_rbf, spec.env_rbf})
    if (!(p.mu > 0.0 && p.delta > 0.0)) throw ModelError(kCtx + ": barrier mu and delta must be > 0");
  return spec;
}

ScenarioInstance::ScenarioInstance(const Scenario& scenario)
    : scenario_(scenario),
      robot_(RobotModel::load(scenario.robot_path)),
      collision_(CollisionModelSpec::load(scenario.robot_path, robot_)),
      dynamics_(robot_.num_joints()) {
  if (scenario_.initial.joints.size() != robot_.num_joints())
    throw ModelError(kCtx + ".initial: field 'joints' must have " + std::to_string(robot_.num_joints()) + " entries");
  if (scenario_.env != "off") {
    const RobotModel sphere_robot = RobotModel::load(scenario_.sphere_robot_path);
    const CollisionModelSpec sphere_spec = CollisionModelSpec::load(scenario_.sphere_robot_path, sphere_robot);
    // Sources are re-attached by link name; both documents share the kinematic tree.
    for (SphereSource src : sphere_spec.sphere_sources()) {
      src.link = robot_.link_index(sphere_robot.link(src.link).name);
      env_bodies_.push_back(src);
      for (const auto& s : decompose_primitive(src.shape, src.delta_max).spheres)
        spheres_.push_back({src.link, src.local_pose * s.center, s.radius});
    }
    if (env_bodies_.empty()) throw ModelError("scenario: the sphere model defines no 'spheres' section");
  }
  CostSpec spec = cost_spec_from_json(scenario_.cost_document, scenario_, robot_);
  if (scenario_.scene_path) {
    scene_ = Scene::load(*scenario_.scene_path);
    for (const auto& b : scene_->boxes) moving_ = moving_ || b.velocity.norm() > 0.0;
    if (scenario_.env != "off") {
      esdf_ = std::make_shared<const EsdfGrid>(compute_esdf(build_occupancy(*scene_, scene_->resolution)));
    }
  }
  cost_ = std::make_unique<WholeBodyCost>(robot_, std::move(spec), &collision_, &spheres_, &env_bodies_);
  if (esdf_) cost_->set_environment(esdf_);
}

OcpProblem ScenarioInstance::problem() const {
  OcpProblem p;
  p.dynamics = &dynamics_;
  p.cost = cost_.get();
  p.horizon = scenario_.horizon;
  p.nodes = scenario_.nodes;
  return p;
}

void ScenarioInstance::advance_environment(double t) {
  if (!moving_ || !esdf_) return;
  const OccupancyGrid next = build_occupancy(*scene_, esdf_->geometry(), t);
  const OccupancyChange change = occupancy_diff(esdf_->occupancy(), next);
  if (change.empty()) return;
  esdf_ = std::make_shared<const EsdfGrid>(update_esdf(*esdf_, change));
  cost_->set_environment(esdf_);
  ++env_updates_;
}

VectorXd ScenarioInstance::initial_state(std::uint64_t seed) const {
  Configuration q = scenario_.initial;
  if (scenario_.initial_noise > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, scenario_.initial_noise);
    for (Eigen::Index i = 0; i < q.joints.size(); ++i) q.joints[i] += noise(rng);
  }
  return WholeBodyDynamics::pack(q);
}

json record_to_json(const MpcRecord& r) {
  json j = {{"t", r.t},
            {"wall_ms", {{"lq", r.times.lq_ms}, {"backward", r.times.backward_ms}, {"linesearch", r.times.linesearch_ms}}},
            {"cost", r.cost}};
  if (r.min_self_h) j["min_self_h"] = *r.min_self_h;
  if (r.min_env_h) j["min_env_h"] = *r.min_env_h;
  j["state"] = json_util::to_json(r.state);
  j["input"] = json_util::to_json(r.input);
  if (r.stalled) j["stalled"] = true;
  return j;
}

ScenarioResult run_scenario(const Scenario& scenario, const RunOptions& options) {
  ScenarioInstance inst(scenario);
  const OcpProblem problem = inst.problem();
  MpcOptions mpc;
  mpc.before_step = [&](double t) { inst.advance_environment(t); };
  const double epsilon = inst.cost().spec().self.epsilon;
  ScenarioResult result;
  mpc.on_record = [&](const MpcRecord& r) {
    if (options.trace_out) *options.trace_out << record_to_json(r).dump() << "\n";
    if (r.min_self_h) {
      const double d = *r.min_self_h + epsilon;
      if (!(result.min_self_distance <= d)) result.min_self_distance = d;
    }
    if (r.min_env_h && !(result.min_env_h <= *r.min_env_h)) result.min_env_h = *r.min_env_h;
  };
  result.trace = mpc_run(problem, inst.initial_state(options.seed),
                         options.duration.value_or(scenario.duration), scenario.rate, mpc);
  const CostSpec& spec = inst.cost().spec();
  if (!spec.ee_reference.empty()) {
    const FrameSet frames =
        forward_kinematics(inst.robot(), WholeBodyDynamics::unpack(result.trace.final_state));
    result.ee_error = (frames[inst.robot().end_effector()].translation - spec.ee_reference.back().position).norm();
  }
  result.env_updates = inst.environment_updates();
  return result;
}

}  // namespace wbmpc
