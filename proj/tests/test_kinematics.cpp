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
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "wbmpc/kinematics.hpp"

using namespace wbmpc;
using nlohmann::json;

namespace {

const std::string kData = WBMPC_DATA_DIR;

json single_revolute() {
  return json::parse(R"({
    "links": [
      {"name": "base", "joint": {"type": "floating"}},
      {"name": "link1", "parent": "base", "joint": {"type": "revolute", "axis": [0, 0, 1]}},
      {"name": "tip", "parent": "link1", "joint": {"type": "fixed", "origin": {"xyz": [1, 0, 0]}}}
    ],
    "end_effector": "tip"})");
}

}  // namespace

TEST_CASE("loading robot documents") {
  const RobotModel one = RobotModel::from_json(single_revolute());
  CHECK(one.num_joints() == 1);
  CHECK(one.tangent_size() == 7);
  const RobotModel detailed = RobotModel::load(kData + "/robots/robot_detailed.json");
  CHECK(detailed.num_joints() == 4);
  CHECK(detailed.link(detailed.end_effector()).name == "ee");
  const RobotModel simplified = RobotModel::load(kData + "/robots/robot_simplified.json");
  CHECK(simplified.num_links() == detailed.num_links());
  for (int i = 0; i < detailed.num_links(); ++i) {
    const Link& parent_first = detailed.link(i);
    if (parent_first.parent >= 0) CHECK(parent_first.parent < i);
  }
}

TEST_CASE("malformed robot documents") {
  json self_parent = single_revolute();
  self_parent["links"][1]["parent"] = "link1";
  CHECK_THROWS_WITH_AS(RobotModel::from_json(self_parent), doctest::Contains("cycle detected"), ModelError);

  json cycle = single_revolute();
  cycle["links"].push_back(json::parse(R"({"name": "x", "parent": "y", "joint": {"type": "fixed"}})"));
  cycle["links"].push_back(json::parse(R"({"name": "y", "parent": "x", "joint": {"type": "fixed"}})"));
  CHECK_THROWS_WITH_AS(RobotModel::from_json(cycle), doctest::Contains("cycle detected"), ModelError);

  json unknown = single_revolute();
  unknown["links"][1]["parent"] = "nowhere";
  CHECK_THROWS_WITH_AS(RobotModel::from_json(unknown), doctest::Contains("unknown parent"), ModelError);

  json duplicate = single_revolute();
  duplicate["links"][2]["name"] = "link1";
  CHECK_THROWS_WITH_AS(RobotModel::from_json(duplicate), doctest::Contains("duplicate link name"), ModelError);

  json no_links = json::object();
  CHECK_THROWS_WITH_AS(RobotModel::from_json(no_links), doctest::Contains("links"), ModelError);
}

TEST_CASE("forward kinematics examples") {
  const RobotModel one = RobotModel::from_json(single_revolute());
  Configuration q = Configuration::zero(one);
  q.joints[0] = std::numbers::pi / 2;
  const FrameSet f = forward_kinematics(one, q);
  CHECK((f[one.link_index("tip")].translation - Vec3(0, 1, 0)).norm() < 1e-12);
  CHECK((f[0].translation - q.base.translation).norm() == 0.0);

  const RobotModel robot = RobotModel::load(kData + "/robots/robot_simplified.json");
  const FrameSet zero = forward_kinematics(robot, Configuration::zero(robot));
  // Shoulder (0.2, 0, 0.125), upper (0, 0, 0.275), two 0.4 links and the 0.1 tool offset.
  CHECK((zero[robot.end_effector()].translation - Vec3(1.1, 0.0, 0.4)).norm() < 1e-12);

  Configuration wrong = Configuration::zero(robot);
  wrong.joints.resize(3);
  CHECK_THROWS_AS(forward_kinematics(robot, wrong), DimensionError);
}

TEST_CASE("forward kinematics matches transform chaining") {
  const RobotModel robot = RobotModel::load(kData + "/robots/robot_detailed.json");
  oracle::Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const Configuration q = oracle::random_configuration(robot, rng);
    const FrameSet f = forward_kinematics(robot, q);
    const auto ref = oracle::chained_frames(robot, q);
    for (int i = 0; i < robot.num_links(); ++i) {
      REQUIRE((f[i].translation - ref[i].topRightCorner<3, 1>()).norm() <= 1e-12);
      REQUIRE((f[i].rotation_matrix() - ref[i].topLeftCorner<3, 3>()).norm() <= 1e-12);
    }
  }
}

TEST_CASE("pose composition is associative") {
  oracle::Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const Pose a = oracle::random_pose(rng, 1), b = oracle::random_pose(rng, 1), c = oracle::random_pose(rng, 1);
    const Pose l = (a * b) * c, r = a * (b * c);
    REQUIRE((l.translation - r.translation).norm() <= 1e-12);
    REQUIRE((l.rotation_matrix() - r.rotation_matrix()).norm() <= 1e-12);
  }
}

TEST_CASE("point Jacobian structure") {
  const RobotModel robot = RobotModel::load(kData + "/robots/robot_simplified.json");
  oracle::Rng rng(3);
  const Configuration q = oracle::random_configuration(robot, rng);
  const PointJacobian j = point_jacobian(robot, q, "ee", Vec3(0.05, 0.01, -0.02));
  CHECK((j.leftCols<3>() - Mat3::Identity()).norm() == 0.0);
  CHECK((j * VectorXd::Zero(robot.tangent_size())).norm() == 0.0);
  // The shell is not below any arm joint.
  const PointJacobian shell = point_jacobian(robot, q, "shell", Vec3(0.1, 0.2, 0.3));
  CHECK(shell.rightCols(robot.num_joints()).norm() == 0.0);
  CHECK_THROWS_AS(point_jacobian(robot, q, "missing", Vec3::Zero()), ModelError);

  // Lever arm: a point at distance d from a revolute axis moves at speed d.
  const RobotModel one = RobotModel::from_json(single_revolute());
  const PointJacobian lever = point_jacobian(one, Configuration::zero(one), "link1", Vec3(0.7, 0, 0.3));
  CHECK(lever.col(6).norm() == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("point Jacobian matches finite differences of forward kinematics") {
  const RobotModel robot = RobotModel::load(kData + "/robots/robot_detailed.json");
  oracle::Rng rng(4);
  std::uniform_int_distribution<int> pick(0, robot.num_links() - 1);
  for (int trial = 0; trial < 100; ++trial) {
    const Configuration q = oracle::random_configuration(robot, rng);
    const int link = pick(rng);
    const Vec3 local = oracle::random_pose(rng, 0.3).translation;
    const PointJacobian j = point_jacobian(robot, q, robot.link(link).name, local);
    const MatrixXd fd = oracle::fd_tangent_jacobian(
        [&](const Configuration& c) { return forward_kinematics(robot, c)[link] * local; }, q, 1e-6);
    REQUIRE((j - fd).cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("retraction and difference are inverse") {
  const RobotModel robot = RobotModel::load(kData + "/robots/robot_simplified.json");
  oracle::Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const Configuration a = oracle::random_configuration(robot, rng);
    const Configuration b = oracle::random_configuration(robot, rng);
    const Configuration c = retract(a, difference(a, b));
    REQUIRE(configuration_distance(b, c) <= 1e-10);
    REQUIRE(configuration_distance(a, a) == 0.0);
  }
  Configuration a = Configuration::zero(robot);
  Configuration b = a;
  b.base.rotation = Quat(Eigen::AngleAxisd(0.5, Vec3::UnitZ()));
  CHECK(configuration_distance(a, b) == doctest::Approx(0.5).epsilon(1e-12));
}
