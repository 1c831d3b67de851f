// Kinematics and rigid-body dynamics of serial chains.
//
// Frames: link i's world pose is  T_i = T_{i-1} * origin_i * motion_i(q_i)
// with T_{-1} the world frame. Revolute joints rotate about `axis`, prismatic
// joints translate along it, both expressed in the joint frame.
#pragma once

#include "hrc/model.hpp"

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <limits>
#include <span>
#include <vector>

namespace hrc {

using Matrix3Xd = Eigen::Matrix<double, 3, Eigen::Dynamic>;
using Matrix6Xd = Eigen::Matrix<double, 6, Eigen::Dynamic>;
using Frames = std::vector<Eigen::Isometry3d>;

/// Values of uᵀΛ⁻¹u below this (kg⁻¹) mean no mobility along u.
inline constexpr double kSingularityGuard = 1e-9;
/// Below this point speed (m/s) the velocity direction is undefined.
inline constexpr double kMinDirectionSpeed = 1e-6;

/// Joint positions/velocities with link frames kept consistent with q.
class RobotState {
 public:
  RobotState(const RobotModel& model, Eigen::VectorXd q, Eigen::VectorXd qdot);
  explicit RobotState(const RobotModel& model);

  const Eigen::VectorXd& q() const { return q_; }
  const Eigen::VectorXd& qdot() const { return qdot_; }
  const Frames& frames() const { return frames_; }
  const RobotModel& model() const { return *model_; }

  void set_q(Eigen::VectorXd q);
  void set_qdot(Eigen::VectorXd qdot);

 private:
  const RobotModel* model_;
  Eigen::VectorXd q_;
  Eigen::VectorXd qdot_;
  Frames frames_;
};

struct InertiaMatrix {
  Eigen::MatrixXd M;
};

Frames forward_kinematics(const RobotModel& model, const Eigen::VectorXd& q);

/// World axis and a point on it for every joint, given link frames.
struct JointAxes {
  std::vector<Eigen::Vector3d> axis;
  std::vector<Eigen::Vector3d> origin;
};
JointAxes joint_axes(const RobotModel& model, const Frames& frames);

/// Linear-velocity Jacobian of a point fixed in `link` (point in link frame).
Matrix3Xd point_jacobian(const RobotModel& model, const Eigen::VectorXd& q, std::size_t link,
                         const Eigen::Vector3d& point);
Matrix3Xd point_jacobian(const RobotModel& model, const Frames& frames, std::size_t link,
                         const Eigen::Vector3d& point);
/// Angular-velocity Jacobian of `link`.
Matrix3Xd angular_jacobian(const RobotModel& model, const Frames& frames, std::size_t link);

/// Joint-space inertia matrix by the composite-rigid-body algorithm.
InertiaMatrix inertia_matrix(const RobotModel& model, const Eigen::VectorXd& q);
InertiaMatrix inertia_matrix(const RobotModel& model, const Frames& frames);

/// Linear block of the inverse Cartesian kinetic-energy matrix at a point,
/// J M⁻¹ Jᵀ (kg⁻¹). Throws std::logic_error if M is singular.
Eigen::Matrix3d cartesian_ke_matrix_inv(const RobotModel& model, const Eigen::VectorXd& q,
                                        std::size_t link, const Eigen::Vector3d& point);
Eigen::Matrix3d cartesian_ke_matrix_inv(const RobotModel& model, const Frames& frames,
                                        std::size_t link, const Eigen::Vector3d& point);

/// Mass perceived at `point` when pushed along unit vector u. +infinity when
/// uᵀΛ⁻¹u < kSingularityGuard. Throws std::invalid_argument for non-unit u.
double effective_mass(const RobotModel& model, const Eigen::VectorXd& q, std::size_t link,
                      const Eigen::Vector3d& point, const Eigen::Vector3d& u);
double effective_mass(const RobotModel& model, const Frames& frames, std::size_t link,
                      const Eigen::Vector3d& point, const Eigen::Vector3d& u);
/// Same, from a precomputed Λ⁻¹ block.
double effective_mass(const Eigen::Matrix3d& lambda_v_inv, const Eigen::Vector3d& u);

/// Half of the summed masses of links 0..link.
double half_mass(const RobotModel& model, std::size_t link);

Eigen::Vector3d link_point_velocity(const RobotModel& model, const RobotState& state, std::size_t link,
                                    const Eigen::Vector3d& point);

/// World position of a point fixed in `link`.
inline Eigen::Vector3d world_point(const Frames& frames, std::size_t link, const Eigen::Vector3d& point) {
  return frames[link] * point;
}

}  // namespace hrc
