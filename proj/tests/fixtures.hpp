// Small analytic robots and file locations shared by the tests.
#pragma once

#include "hrc/model.hpp"

#include <Eigen/Geometry>

#include <filesystem>
#include <random>
#include <string>

namespace fixtures {

inline std::filesystem::path data_dir() { return HRC_DATA_DIR; }
inline std::filesystem::path data(const std::string& name) { return data_dir() / name; }

inline hrc::JointSpec revolute_z(const std::string& name, const Eigen::Vector3d& offset = Eigen::Vector3d::Zero()) {
  hrc::JointSpec j;
  j.name = name;
  j.kind = hrc::JointKind::revolute;
  j.axis = Eigen::Vector3d::UnitZ();
  j.origin = Eigen::Isometry3d::Identity();
  j.origin.translation() = offset;
  j.position_min = -2.0 * M_PI;
  j.position_max = 2.0 * M_PI;
  j.velocity_limit = 10.0;
  return j;
}

inline hrc::LinkSpec link(const std::string& name, double mass, const Eigen::Vector3d& com, double izz = 0.0) {
  hrc::LinkSpec l;
  l.name = name;
  l.mass = mass;
  l.com = com;
  l.inertia = Eigen::Vector3d(0.0, 0.0, izz).asDiagonal();
  return l;
}

/// Planar arm in the xy plane: link lengths l1, l2, centres of mass at lc1,
/// lc2 along each link, inertias I1, I2 about z through the centres.
struct Planar2R {
  double l1 = 1.0, l2 = 1.0;
  double m1 = 1.0, m2 = 1.0;
  double lc1 = 0.5, lc2 = 0.5;
  double I1 = 1.0 / 12.0, I2 = 1.0 / 12.0;

  hrc::RobotModel model() const {
    hrc::RobotModel m;
    m.name = "planar2r";
    m.joints = {revolute_z("j1"), revolute_z("j2", {l1, 0, 0})};
    m.links = {link("l1", m1, {lc1, 0, 0}, I1), link("l2", m2, {lc2, 0, 0}, I2)};
    m.links[0].collision_geometry = {{Eigen::Vector3d::Zero(), Eigen::Vector3d(l1, 0, 0), 0.05}};
    m.links[1].collision_geometry = {{Eigen::Vector3d::Zero(), Eigen::Vector3d(l2, 0, 0), 0.05}};
    m.sensing_mode = hrc::SensingMode::joint_torque;
    m.tool_point = {l2, 0, 0};
    return m;
  }

  // Textbook closed forms.
  Eigen::Matrix2d inertia(const Eigen::Vector2d& q) const {
    const double c2 = std::cos(q[1]);
    Eigen::Matrix2d M;
    M(0, 0) = m1 * lc1 * lc1 + I1 + m2 * (l1 * l1 + lc2 * lc2 + 2.0 * l1 * lc2 * c2) + I2;
    M(0, 1) = M(1, 0) = m2 * (lc2 * lc2 + l1 * lc2 * c2) + I2;
    M(1, 1) = m2 * lc2 * lc2 + I2;
    return M;
  }
  Eigen::Matrix<double, 2, 2> tip_jacobian(const Eigen::Vector2d& q) const {
    const double s1 = std::sin(q[0]), c1 = std::cos(q[0]);
    const double s12 = std::sin(q[0] + q[1]), c12 = std::cos(q[0] + q[1]);
    Eigen::Matrix2d J;
    J << -l1 * s1 - l2 * s12, -l2 * s12, l1 * c1 + l2 * c12, l2 * c12;
    return J;
  }
};

/// One prismatic joint along x moving a body of `mass`.
inline hrc::RobotModel prismatic_x(double mass = 3.0) {
  hrc::RobotModel m;
  m.name = "prismatic";
  hrc::JointSpec j;
  j.name = "slide";
  j.kind = hrc::JointKind::prismatic;
  j.axis = Eigen::Vector3d::UnitX();
  j.position_min = -1.0;
  j.position_max = 1.0;
  j.velocity_limit = 1.0;
  m.joints = {j};
  m.links = {link("body", mass, Eigen::Vector3d::Zero())};
  m.links[0].inertia = Eigen::Matrix3d::Identity() * 0.01;
  m.links[0].collision_geometry = {{Eigen::Vector3d(-0.05, 0, 0), Eigen::Vector3d(0.05, 0, 0), 0.05}};
  m.sensing_mode = hrc::SensingMode::joint_torque;
  return m;
}

/// One revolute z joint with a point mass `mass` at distance r along x.
inline hrc::RobotModel single_revolute(double mass = 2.0, double r = 0.5) {
  hrc::RobotModel m;
  m.name = "single";
  m.joints = {revolute_z("j1")};
  m.links = {link("l1", mass, {r, 0, 0})};
  m.links[0].collision_geometry = {{Eigen::Vector3d::Zero(), Eigen::Vector3d(1, 0, 0), 0.05}};
  m.sensing_mode = hrc::SensingMode::joint_torque;
  m.tool_point = {1, 0, 0};
  return m;
}

inline Eigen::VectorXd random_q(const hrc::RobotModel& m, std::mt19937_64& rng) {
  Eigen::VectorXd q(m.dof());
  for (std::size_t i = 0; i < m.dof(); ++i) {
    const double lo = std::max(m.joints[i].position_min, -M_PI), hi = std::min(m.joints[i].position_max, M_PI);
    q[i] = std::uniform_real_distribution<double>(lo, hi)(rng);
  }
  return q;
}

}  // namespace fixtures
