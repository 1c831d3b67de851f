#include "fixtures.hpp"
#include "hrc/sensing.hpp"

#include <doctest.h>

#include <random>
#include <set>

using namespace hrc;
using doctest::Approx;

namespace {

const RobotModel& ur10e() {
  static const RobotModel m = load_robot(fixtures::data("ur10e_like.json"));
  return m;
}

RobotState ur_start() {
  const ScenarioConfig s = load_scenario(fixtures::data("scenario_ur10e.json"));
  return RobotState(ur10e(), Eigen::Map<const Eigen::VectorXd>(s.start_configuration.data(), 6),
                    Eigen::VectorXd::Zero(6));
}

// Sphere of radius r touching capsule `cap` of `link` at axis parameter t,
// overlapping its surface by `depth`.
Obstacle sphere_on_capsule(const RobotState& st, std::size_t link, std::size_t cap, double t, double r, double depth) {
  const Capsule& c = ur10e().links[link].collision_geometry[cap];
  const Eigen::Vector3d a = st.frames()[link] * c.p0, b = st.frames()[link] * c.p1;
  Eigen::Vector3d e1, e2;
  geom::perpendicular_basis((b - a).normalized(), e1, e2);
  const Eigen::Vector3d center = a + t * (b - a) + (c.radius + r - depth) * e1;
  return Obstacle::sphere("probe", center, r, ContactClass::transient);
}

}  // namespace

TEST_CASE("capsule proximity against a sphere") {
  const Eigen::Vector3d a(0, 0, 0), b(1, 0, 0);
  const Obstacle s = Obstacle::sphere("s", {0.5, 0.3, 0}, 0.1, ContactClass::transient);
  auto near = capsule_proximity(a, b, 0.05, s, 1.0);
  REQUIRE(near);
  CHECK(near->penetration == Approx(0.05 + 0.1 - 0.3));
  auto hit = capsule_proximity(a, b, 0.25, s, 1.0);
  REQUIRE(hit);
  CHECK(hit->penetration == Approx(0.05));
  CHECK((hit->normal - Eigen::Vector3d(0, -1, 0)).norm() < 1e-12);
  CHECK_FALSE(capsule_proximity(a, b, 0.05, Obstacle::sphere("far", {0, 5, 0}, 0.1, ContactClass::transient)));
}

TEST_CASE("capsule proximity against a box") {
  const auto box = geom::box_behind_face({0, 0, 0}, Eigen::Vector3d::UnitZ(), {0.1, 0.1, 0.05});
  const Obstacle o = Obstacle::make_box("b", box, ContactClass::quasi_static);
  auto p = capsule_proximity({-0.05, 0, 0.03}, {0.05, 0, 0.03}, 0.04, o, 1.0);
  REQUIRE(p);
  CHECK(p->penetration == Approx(0.01));
  CHECK((p->normal - Eigen::Vector3d::UnitZ()).norm() < 1e-9);
}

TEST_CASE("skin detection") {
  const RobotState st = ur_start();
  SUBCASE("nothing in reach") {
    const std::vector<Obstacle> obs{Obstacle::sphere("far", {5, 5, 5}, 0.1, ContactClass::transient)};
    CHECK(detect_skin(ur10e(), st, obs).empty());
  }
  SUBCASE("sphere on pad 9") {
    const SkinPad& pad = ur10e().pad(9);
    const std::vector<Obstacle> obs{sphere_on_capsule(st, pad.link, pad.surface_patch.capsule, 0.5, 0.02, 0.004)};
    const auto ev = detect_skin(ur10e(), st, obs, 1.5);
    REQUIRE(ev.size() == 1);
    CHECK(*ev[0].pad == 9);
    CHECK(ev[0].link == pad.link);
    CHECK(ev[0].time == 1.5);
    CHECK(ev[0].obstacle == "probe");
    // Deepest point lies on the capsule surface facing the sphere.
    CHECK((ev[0].point_world - obs[0].center).norm() == Approx(0.02 - 0.004).epsilon(1e-6));
  }
  SUBCASE("sphere across two adjacent pads") {
    const SkinPad& p3 = ur10e().pad(3);
    const std::vector<Obstacle> obs{sphere_on_capsule(st, p3.link, p3.surface_patch.capsule, 0.5, 0.03, 0.005)};
    const auto ev = detect_skin(ur10e(), st, obs);
    REQUIRE(ev.size() == 2);
    CHECK(*ev[0].pad == 3);
    CHECK(*ev[1].pad == 4);
  }
  SUBCASE("identical inputs give identical events") {
    const SkinPad& p3 = ur10e().pad(3);
    const std::vector<Obstacle> obs{sphere_on_capsule(st, p3.link, p3.surface_patch.capsule, 0.3, 0.03, 0.005)};
    const auto a = detect_skin(ur10e(), st, obs), b = detect_skin(ur10e(), st, obs);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].pad == b[i].pad);
      CHECK(a[i].point_world == b[i].point_world);
      CHECK(a[i].normal == b[i].normal);
    }
  }
}

TEST_CASE("pad sectors split the forearm") {
  const RobotState st = ur_start();
  std::set<int> seen;
  for (double phi : {-2.5, -1.5, -0.6, 0.6, 1.5, 2.5}) {
    const SkinPad& p5 = ur10e().pad(5);
    const Capsule& c = ur10e().links[p5.link].collision_geometry[p5.surface_patch.capsule];
    Eigen::Vector3d e1, e2;
    geom::perpendicular_basis((c.p1 - c.p0).normalized(), e1, e2);
    const Eigen::Vector3d dir = std::cos(phi) * e1 + std::sin(phi) * e2;
    const Eigen::Vector3d center_link = c.p0 + 0.25 * (c.p1 - c.p0) + (c.radius + 0.015) * dir;
    const std::vector<Obstacle> obs{
        Obstacle::sphere("s", st.frames()[p5.link] * center_link, 0.02, ContactClass::transient)};
    const auto ev = detect_skin(ur10e(), st, obs);
    REQUIRE(ev.size() == 1);
    CHECK(*ev[0].pad == (phi < 0.0 ? 5 : 6));
    seen.insert(*ev[0].pad);
  }
  CHECK(seen.size() == 2);
}

TEST_CASE("torque residual") {
  const RobotModel iiwa = load_robot(fixtures::data("iiwa7_like.json"));
  const RobotState st(iiwa, Eigen::VectorXd::Constant(7, 0.3), Eigen::VectorXd::Zero(7));
  SUBCASE("zero force") {
    CHECK(synth_residual(iiwa, st, Eigen::Vector3d::Zero(), 4, Eigen::Vector3d::Zero()).tau_ext.norm() == 0.0);
  }
  SUBCASE("support stops at the contact link") {
    const auto r = synth_residual(iiwa, st, Eigen::Vector3d(3, -2, 5), 3, Eigen::Vector3d(0, 0.1, 0));
    CHECK(r.tau_ext.size() == 7);
    CHECK(r.tau_ext.tail(3).norm() == 0.0);
    CHECK(r.tau_ext.head(4).norm() > 0.0);
  }
  SUBCASE("planar 2R hand computation") {
    const fixtures::Planar2R arm;
    const RobotModel m = arm.model();
    const Eigen::Vector2d q(0.4, 0.9);
    const RobotState s2(m, q, Eigen::Vector2d::Zero());
    const Eigen::Vector3d f(0.0, 1.0, 0.0);
    const auto r = synth_residual(m, s2, f, 1, Eigen::Vector3d(arm.l2, 0, 0));
    // τ₁ = l1 cos q1 + l2 cos(q1+q2), τ₂ = l2 cos(q1+q2) for a unit +y force at the tip.
    CHECK(r.tau_ext[0] == Approx(std::cos(0.4) + std::cos(1.3)));
    CHECK(r.tau_ext[1] == Approx(std::cos(1.3)));
  }
}

TEST_CASE("residual isolation") {
  CHECK_FALSE(isolate_from_residual({Eigen::VectorXd::Zero(7)}));
  Eigen::VectorXd spike = Eigen::VectorXd::Zero(7);
  spike[5] = 0.5;
  CHECK(isolate_from_residual({spike}) == 5u);
  CHECK_THROWS_AS(isolate_from_residual({spike}, 0.0), std::invalid_argument);

  const RobotModel iiwa = load_robot(fixtures::data("iiwa7_like.json"));
  std::mt19937_64 rng(17);
  std::normal_distribution<double> n01;
  int trials = 0, recovered = 0;
  while (trials < 1000) {
    const RobotState st(iiwa, fixtures::random_q(iiwa, rng), Eigen::VectorXd::Zero(7));
    const std::size_t link = std::uniform_int_distribution<std::size_t>(0, 6)(rng);
    const Eigen::Vector3d point(0.05 * n01(rng), 0.05 * n01(rng), 0.1 + 0.05 * n01(rng));
    const Eigen::Vector3d f = 50.0 * Eigen::Vector3d(n01(rng), n01(rng), n01(rng));
    const auto r = synth_residual(iiwa, st, f, link, point);
    if (std::abs(r.tau_ext[static_cast<Eigen::Index>(link)]) <= 2.0 * kDefaultResidualEpsilon) continue;
    ++trials;
    recovered += isolate_from_residual(r) == link ? 1 : 0;
  }
  CHECK(recovered >= 990);
}
