#include "fixtures.hpp"
#include "hrc/dynamics.hpp"
#include "hrc/model.hpp"
#include "hrc/simworld.hpp"

#include <doctest.h>

#include <string>

using namespace hrc;

namespace {

std::string one_joint(const std::string& axis = "[0, 0, 1]") {
  return R"({
    "format_version": 1,
    "name": "one",
    "sensing_mode": "joint_torque",
    "joints": [{"name": "j1", "kind": "revolute", "axis": )" + axis + R"(,
                "origin": {"translation": [0, 0, 0], "rotation": [1, 0, 0, 0]},
                "position_limits": [-3, 3], "velocity_limit": 1.0}],
    "links": [{"name": "l1", "mass": 1.0, "com": [0.1, 0, 0],
               "inertia": [[0.01, 0, 0], [0, 0.01, 0], [0, 0, 0.01]],
               "collision_geometry": [{"p0": [0, 0, 0], "p1": [0.2, 0, 0], "radius": 0.05}]}]
  })";
}

}  // namespace

TEST_CASE("minimal one-joint document") {
  const RobotModel m = parse_robot(one_joint());
  CHECK(m.dof() == 1);
  CHECK(m.links.size() == 1);
  CHECK(m.links[0].mass == 1.0);
  CHECK(m.sensing_mode == SensingMode::joint_torque);
  CHECK(m.pads.empty());
}

TEST_CASE("non-unit axis is rejected with its field path") {
  try {
    parse_robot(one_joint("[0, 0, 2]"));
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.field() == "joints[0].axis");
    CHECK(std::string(e.what()).find("axis not unit") != std::string::npos);
  }
}

TEST_CASE("malformed and unreadable inputs") {
  CHECK_THROWS_AS(parse_robot("{not json"), ParseError);
  CHECK_THROWS_AS(parse_robot(R"({"format_version": 1})"), ParseError);
  CHECK_THROWS_AS(parse_robot(R"({"format_version": 7, "joints": []})"), ValidationError);
  CHECK_THROWS_AS(load_robot("/nonexistent/robot.json"), IoError);
}

TEST_CASE("bundled UR10e-like description") {
  const RobotModel m = load_robot(fixtures::data("ur10e_like.json"));
  CHECK(m.dof() == 6);
  CHECK(m.pads.size() == 11);
  CHECK(m.sensing_mode == SensingMode::skin_pads);
  double total = 0.0;
  for (const auto& l : m.links) total += l.mass;
  CHECK(total > 0.0);
  // Stretched out at q = 0 the tool should sit near the published 1.3 m reach.
  const Frames F = forward_kinematics(m, Eigen::VectorXd::Zero(6));
  const double reach = (tool_position(m, F) - F[1].translation()).norm();
  CHECK(reach > 1.2);
  CHECK(reach < 1.45);
  for (const auto& p : m.pads) CHECK(m.pad(p.id).link == p.link);
}

TEST_CASE("bundled iiwa-like description") {
  const RobotModel m = load_robot(fixtures::data("iiwa7_like.json"));
  CHECK(m.dof() == 7);
  CHECK(m.sensing_mode == SensingMode::joint_torque);
  CHECK(m.pads.empty());
}

TEST_CASE("serialize round trip preserves kinematics and inertia") {
  const RobotModel a = load_robot(fixtures::data("ur10e_like.json"));
  const RobotModel b = parse_robot(serialize_robot(a));
  REQUIRE(b.dof() == a.dof());
  REQUIRE(b.pads.size() == a.pads.size());
  std::mt19937_64 rng(3);
  for (int i = 0; i < 10; ++i) {
    const Eigen::VectorXd q = fixtures::random_q(a, rng);
    const Frames fa = forward_kinematics(a, q), fb = forward_kinematics(b, q);
    for (std::size_t l = 0; l < a.dof(); ++l) CHECK((fa[l].matrix() - fb[l].matrix()).norm() < 1e-12);
    CHECK((inertia_matrix(a, q).M - inertia_matrix(b, q).M).norm() < 1e-11);
  }
}

TEST_CASE("scenario defaults and validation") {
  const ScenarioConfig s = parse_scenario(R"({"format_version": 1, "name": "empty"})");
  CHECK(s.spring_constant == 75000.0);
  CHECK(s.human_mass == 5.6);
  CHECK(s.buckets.empty());
  CHECK_FALSE(s.clamp.has_value());

  CHECK_THROWS_AS(parse_scenario(R"({"format_version": 1, "human_mass": -1})"), ValidationError);

  const RobotModel m = load_robot(fixtures::data("ur10e_like.json"));
  ScenarioConfig bad = load_scenario(fixtures::data("scenario_ur10e.json"));
  bad.start_configuration.pop_back();
  CHECK_THROWS_AS(validate_pair(m, bad), ValidationError);
}

TEST_CASE("bundled scenarios fit their robots") {
  const RobotModel ur = load_robot(fixtures::data("ur10e_like.json"));
  const ScenarioConfig su = load_scenario(fixtures::data("scenario_ur10e.json"));
  CHECK_NOTHROW(validate_pair(ur, su));
  CHECK(su.buckets.size() == 3);
  CHECK(su.clamp.has_value());
  CHECK(su.buckets[0].string_length == doctest::Approx(0.64));

  const RobotModel iiwa = load_robot(fixtures::data("iiwa7_like.json"));
  const ScenarioConfig si = load_scenario(fixtures::data("scenario_iiwa7.json"));
  CHECK_NOTHROW(validate_pair(iiwa, si));
  bool capped = false;
  for (const auto& seg : si.task_script) capped |= seg.speed_cap && *seg.speed_cap == 0.4;
  CHECK(capped);
}
