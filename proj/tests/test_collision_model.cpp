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
#include <limits>

#include "doctest.h"
#include "oracles.hpp"
#include "wbmpc/collision_model.hpp"

using namespace wbmpc;
using nlohmann::json;

namespace {

const std::string kData = WBMPC_DATA_DIR;

void check_decomposition(const Primitive& shape, double delta_max, std::uint64_t seed) {
  const Decomposition d = decompose_primitive(shape, delta_max);
  REQUIRE(!d.spheres.empty());
  for (const auto& s : d.spheres) REQUIRE(s.radius == d.spheres.front().radius);
  oracle::Rng rng(seed);
  CHECK(oracle::coverage_gap(shape, d, 10000, rng) <= 1e-6);
  const double protrusion = oracle::sampled_protrusion(shape, d, 10000, rng);
  CHECK(protrusion <= delta_max + 1e-6);
  CHECK(protrusion <= d.protrusion + 1e-9);
}

}  // namespace

TEST_CASE("fixture body and pair counts") {
  const RobotModel detailed_robot = RobotModel::load(kData + "/robots/robot_detailed.json");
  const CollisionModelSpec detailed =
      CollisionModelSpec::load(kData + "/robots/robot_detailed.json", detailed_robot);
  CHECK(detailed.bodies().size() == 16);
  CHECK(detailed.base_bodies().size() == 13);
  CHECK(detailed.arm_bodies().size() == 3);
  CHECK(detailed.pairs().size() == 39);

  const RobotModel simplified_robot = RobotModel::load(kData + "/robots/robot_simplified.json");
  const CollisionModelSpec simplified =
      CollisionModelSpec::load(kData + "/robots/robot_simplified.json", simplified_robot);
  CHECK(simplified.bodies().size() == 5);
  CHECK(simplified.base_bodies().size() == 3);
  CHECK(simplified.arm_bodies().size() == 2);
  CHECK(simplified.pairs().size() == 6);
  CHECK(simplified.sphere_sources().size() == 5);
  for (const auto& p : simplified.pairs()) {
    CHECK(simplified.bodies()[p.a].group == BodyGroup::Arm);
    CHECK(simplified.bodies()[p.b].group == BodyGroup::Base);
  }
}

TEST_CASE("collision document validation") {
  const RobotModel robot = RobotModel::load(kData + "/robots/robot_simplified.json");
  const json base = json::parse(R"({"bodies": [
      {"name": "a", "link": "arm_upper", "group": "arm", "shape": {"type": "sphere", "radius": 0.1}},
      {"name": "b", "link": "shell", "group": "base", "shape": {"type": "box", "half_extents": [0.1, 0.1, 0.1]}}],
      "pairs": []})");
  const CollisionModelSpec empty = CollisionModelSpec::from_json(base, robot);
  CHECK(empty.pairs().empty());

  json unknown_link = base;
  unknown_link["bodies"][0]["link"] = "tail";
  CHECK_THROWS_WITH_AS(CollisionModelSpec::from_json(unknown_link, robot), doctest::Contains("unknown link"), ModelError);

  json duplicate = base;
  duplicate["bodies"][1]["name"] = "a";
  CHECK_THROWS_WITH_AS(CollisionModelSpec::from_json(duplicate, robot), doctest::Contains("duplicate body name"), ModelError);

  json self_pair = base;
  self_pair["pairs"] = json::parse(R"([["a", "a"]])");
  CHECK_THROWS_AS(CollisionModelSpec::from_json(self_pair, robot), ModelError);

  json bad_shape = base;
  bad_shape["bodies"][0]["shape"] = json::parse(R"({"type": "cone", "radius": 0.1})");
  CHECK_THROWS_WITH_AS(CollisionModelSpec::from_json(bad_shape, robot), doctest::Contains("cone"), ModelError);

  json missing_radius = base;
  missing_radius["bodies"][0]["shape"] = json::parse(R"({"type": "sphere"})");
  CHECK_THROWS_WITH_AS(CollisionModelSpec::from_json(missing_radius, robot), doctest::Contains("radius"), ModelError);

  json rule = base;
  rule["pairs"] = "arm_x_base";
  CHECK(CollisionModelSpec::from_json(rule, robot).pairs().size() == 1);
}

TEST_CASE("primitive documents round-trip") {
  for (const Primitive& p : {Primitive(Sphere{0.1}), Primitive(Box{Vec3(0.1, 0.2, 0.3)}),
                             Primitive(Cylinder{0.1, 0.4}), Primitive(Capsule{0.05, 0.2})}) {
    const Primitive back = primitive_from_json(primitive_to_json(p), "shape");
    CHECK(primitive_to_json(back) == primitive_to_json(p));
  }
}

TEST_CASE("sphere decomposition examples") {
  const Decomposition sphere = decompose_primitive(Sphere{0.3}, 0.01);
  REQUIRE(sphere.spheres.size() == 1);
  CHECK(sphere.spheres[0].radius == 0.3);
  CHECK(sphere.spheres[0].center.norm() == 0.0);

  const Decomposition cube = decompose_primitive(Box{Vec3(0.1, 0.1, 0.1)}, 0.4);
  REQUIRE(cube.spheres.size() == 1);
  CHECK(cube.spheres[0].radius == doctest::Approx(0.1 * std::sqrt(3.0)).epsilon(1e-12));
  CHECK(cube.protrusion == doctest::Approx(0.1 * (std::sqrt(3.0) - 1.0)).epsilon(1e-12));

  check_decomposition(Cylinder{0.05, 0.3}, 0.05, 1);
  CHECK_THROWS_AS(decompose_primitive(Capsule{0.1, 0.2}, 0.1), GeometryError);
  CHECK_THROWS_AS(decompose_primitive(Box{Vec3(0.1, 0.1, 0.1)}, 0.0), GeometryError);
  // A thick cylinder cannot keep equal-radius spheres within a tight bound.
  CHECK_THROWS_AS(decompose_primitive(Cylinder{0.5, 0.5}, 0.05), GeometryError);
}

TEST_CASE("decompositions cover and stay within the protrusion bound") {
  oracle::Rng rng(21);
  std::uniform_real_distribution<double> dim(0.03, 0.5), delta(0.02, 0.3);
  for (int trial = 0; trial < 30; ++trial) {
    const Box box{Vec3(dim(rng), dim(rng), dim(rng))};
    check_decomposition(box, delta(rng), 100 + trial);
  }
  for (int trial = 0; trial < 30; ++trial) {
    const double d = delta(rng);
    const Cylinder cyl{std::min(dim(rng), d / (std::sqrt(2.0) - 1.0)), dim(rng)};
    // Best protrusion over every spacing that divides the length evenly.
    double best = std::numeric_limits<double>::infinity();
    for (int k = 1; k < 1000; ++k) {
      const double sp = cyl.half_length / k;
      best = std::min(best, std::hypot(cyl.radius, sp) - std::min(cyl.radius, sp));
    }
    if (best > d) {
      CHECK_THROWS_AS(decompose_primitive(cyl, d), GeometryError);
      continue;
    }
    check_decomposition(cyl, d, 200 + trial);
  }
}

TEST_CASE("a tighter bound never yields fewer spheres") {
  const Box box{Vec3(0.42, 0.2, 0.14)};
  std::size_t previous = 0;
  for (double d : {0.5, 0.4, 0.2, 0.1, 0.05, 0.03}) {
    const std::size_t n = decompose_primitive(box, d).spheres.size();
    CHECK(n >= previous);
    previous = n;
  }
}

TEST_CASE("fixture sphere set") {
  const RobotModel robot = RobotModel::load(kData + "/robots/robot_simplified.json");
  const CollisionModelSpec spec = CollisionModelSpec::load(kData + "/robots/robot_simplified.json", robot);
  const std::vector<std::size_t> expected = {1, 1, 3, 3, 1};
  const std::vector<double> deltas = {0.40, 0.10, 0.05, 0.05, 0.10};
  REQUIRE(spec.sphere_sources().size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const SphereSource& src = spec.sphere_sources()[i];
    CHECK(src.delta_max == deltas[i]);
    CHECK(decompose_primitive(src.shape, src.delta_max).spheres.size() == expected[i]);
  }
  const SphereSet set = build_sphere_set(spec);
  CHECK(set.size() == 9);

  // World centers follow forward kinematics.
  oracle::Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const Configuration q = oracle::random_configuration(robot, rng);
    const auto frames = oracle::chained_frames(robot, q);
    const auto centers = sphere_centers_world(set, forward_kinematics(robot, q));
    for (std::size_t i = 0; i < set.size(); ++i) {
      const Eigen::Vector4d h = frames[set[i].link] * set[i].local_center.homogeneous();
      REQUIRE((centers[i] - h.head<3>()).norm() <= 1e-12);
    }
  }

  Configuration shifted = Configuration::zero(robot);
  const auto at_zero = sphere_centers_world(set, forward_kinematics(robot, shifted));
  shifted.base.translation = Vec3(1.0, -2.0, 0.5);
  const auto moved = sphere_centers_world(set, forward_kinematics(robot, shifted));
  for (std::size_t i = 0; i < set.size(); ++i)
    CHECK((moved[i] - at_zero[i] - Vec3(1.0, -2.0, 0.5)).norm() <= 1e-12);

  SphereSet one = {{0, Vec3::Zero(), 0.1}};
  CHECK(sphere_centers_world(one, forward_kinematics(robot, Configuration::zero(robot)))[0].norm() == 0.0);
  one[0].link = 99;
  CHECK_THROWS_AS(sphere_centers_world(one, forward_kinematics(robot, Configuration::zero(robot))), ModelError);
}
