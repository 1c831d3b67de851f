#include "hrc/dynamics.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <stdexcept>
#include <string>

namespace hrc {

namespace {

void check_dim(const RobotModel& model, const Eigen::VectorXd& v, const char* what) {
  if (static_cast<std::size_t>(v.size()) != model.dof()) {
    throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(model.dof()) +
                                " entries, got " + std::to_string(v.size()));
  }
}

void check_link(const RobotModel& model, std::size_t link) {
  if (link >= model.links.size()) {
    throw std::out_of_range("link index " + std::to_string(link) + " out of range");
  }
}

Eigen::Isometry3d joint_motion(const JointSpec& j, double q) {
  Eigen::Isometry3d m = Eigen::Isometry3d::Identity();
  switch (j.kind) {
    case JointKind::revolute: m.linear() = Eigen::AngleAxisd(q, j.axis).toRotationMatrix(); break;
    case JointKind::prismatic: m.translation() = j.axis * q; break;
    case JointKind::fixed: break;
  }
  return m;
}

}  // namespace

RobotState::RobotState(const RobotModel& model, Eigen::VectorXd q, Eigen::VectorXd qdot)
    : model_(&model), q_(std::move(q)), qdot_(std::move(qdot)) {
  check_dim(model, q_, "q");
  check_dim(model, qdot_, "qdot");
  frames_ = forward_kinematics(model, q_);
}

RobotState::RobotState(const RobotModel& model)
    : RobotState(model, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.dof())),
                 Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.dof()))) {}

void RobotState::set_q(Eigen::VectorXd q) {
  check_dim(*model_, q, "q");
  q_ = std::move(q);
  frames_ = forward_kinematics(*model_, q_);
}

void RobotState::set_qdot(Eigen::VectorXd qdot) {
  check_dim(*model_, qdot, "qdot");
  qdot_ = std::move(qdot);
}

Frames forward_kinematics(const RobotModel& model, const Eigen::VectorXd& q) {
  check_dim(model, q, "q");
  Frames frames;
  frames.reserve(model.dof());
  Eigen::Isometry3d T = Eigen::Isometry3d::Identity();
  for (std::size_t i = 0; i < model.dof(); ++i) {
    const auto& j = model.joints[i];
    T = T * j.origin * joint_motion(j, q[static_cast<Eigen::Index>(i)]);
    frames.push_back(T);
  }
  return frames;
}

JointAxes joint_axes(const RobotModel& model, const Frames& frames) {
  JointAxes ax;
  ax.axis.reserve(model.dof());
  ax.origin.reserve(model.dof());
  for (std::size_t i = 0; i < model.dof(); ++i) {
    // A joint's motion leaves its own axis invariant, so the axis can be read
    // off the moved frame. The prismatic origin is irrelevant.
    ax.axis.push_back(frames[i].linear() * model.joints[i].axis);
    ax.origin.push_back(frames[i].translation());
  }
  return ax;
}

Matrix3Xd point_jacobian(const RobotModel& model, const Frames& frames, std::size_t link,
                         const Eigen::Vector3d& point) {
  check_link(model, link);
  const Eigen::Vector3d p = frames[link] * point;
  Matrix3Xd J = Matrix3Xd::Zero(3, static_cast<Eigen::Index>(model.dof()));
  for (std::size_t j = 0; j <= link; ++j) {
    const auto& js = model.joints[j];
    const Eigen::Vector3d z = frames[j].linear() * js.axis;
    const auto col = static_cast<Eigen::Index>(j);
    if (js.kind == JointKind::revolute) {
      J.col(col) = z.cross(p - frames[j].translation());
    } else if (js.kind == JointKind::prismatic) {
      J.col(col) = z;
    }
  }
  return J;
}

Matrix3Xd point_jacobian(const RobotModel& model, const Eigen::VectorXd& q, std::size_t link,
                         const Eigen::Vector3d& point) {
  check_link(model, link);
  return point_jacobian(model, forward_kinematics(model, q), link, point);
}

Matrix3Xd angular_jacobian(const RobotModel& model, const Frames& frames, std::size_t link) {
  check_link(model, link);
  Matrix3Xd J = Matrix3Xd::Zero(3, static_cast<Eigen::Index>(model.dof()));
  for (std::size_t j = 0; j <= link; ++j) {
    if (model.joints[j].kind == JointKind::revolute) {
      J.col(static_cast<Eigen::Index>(j)) = frames[j].linear() * model.joints[j].axis;
    }
  }
  return J;
}

InertiaMatrix inertia_matrix(const RobotModel& model, const Frames& frames) {
  const std::size_t n = model.dof();
  InertiaMatrix out{Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n))};

  // Composite of links j..n-1, all in world coordinates: total mass, first
  // moment of mass and rotational inertia about the world origin.
  double mass = 0.0;
  Eigen::Vector3d first_moment = Eigen::Vector3d::Zero();
  Eigen::Matrix3d inertia_origin = Eigen::Matrix3d::Zero();

  const JointAxes ax = joint_axes(model, frames);
  for (std::size_t jj = n; jj-- > 0;) {
    const auto& link = model.links[jj];
    const Eigen::Matrix3d R = frames[jj].linear();
    const Eigen::Vector3d c = frames[jj] * link.com;
    mass += link.mass;
    first_moment += link.mass * c;
    inertia_origin += R * link.inertia * R.transpose() +
                      link.mass * (c.squaredNorm() * Eigen::Matrix3d::Identity() - c * c.transpose());

    const JointKind kind_j = model.joints[jj].kind;
    if (kind_j == JointKind::fixed) continue;

    // Wrench (force, moment about world origin) to give the composite a unit
    // acceleration of joint jj from rest.
    const Eigen::Vector3d& z = ax.axis[jj];
    Eigen::Vector3d force;
    Eigen::Vector3d moment;
    if (kind_j == JointKind::revolute) {
      const Eigen::Vector3d& o = ax.origin[jj];
      force = z.cross(first_moment - mass * o);
      moment = inertia_origin * z - first_moment.cross(z.cross(o));
    } else {
      force = mass * z;
      moment = first_moment.cross(z);
    }

    for (std::size_t i = 0; i <= jj; ++i) {
      const JointKind kind_i = model.joints[i].kind;
      double value = 0.0;
      if (kind_i == JointKind::revolute) {
        value = ax.axis[i].dot(moment - ax.origin[i].cross(force));
      } else if (kind_i == JointKind::prismatic) {
        value = ax.axis[i].dot(force);
      }
      const auto r = static_cast<Eigen::Index>(i);
      const auto col = static_cast<Eigen::Index>(jj);
      out.M(r, col) = value;
      out.M(col, r) = value;
    }
  }
  return out;
}

InertiaMatrix inertia_matrix(const RobotModel& model, const Eigen::VectorXd& q) {
  return inertia_matrix(model, forward_kinematics(model, q));
}

Eigen::Matrix3d cartesian_ke_matrix_inv(const RobotModel& model, const Frames& frames, std::size_t link,
                                        const Eigen::Vector3d& point) {
  check_link(model, link);
  const Matrix3Xd J = point_jacobian(model, frames, link, point);
  const Eigen::MatrixXd M = inertia_matrix(model, frames).M;

  // Fixed joints contribute neither a Jacobian column nor inertia; drop them.
  std::vector<Eigen::Index> movable;
  for (std::size_t i = 0; i < model.dof(); ++i) {
    if (model.joints[i].kind != JointKind::fixed) movable.push_back(static_cast<Eigen::Index>(i));
  }
  const auto m = static_cast<Eigen::Index>(movable.size());
  if (m == 0) return Eigen::Matrix3d::Zero();
  Eigen::MatrixXd Ms(m, m);
  Eigen::MatrixXd Js(3, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    Js.col(a) = J.col(movable[a]);
    for (Eigen::Index b = 0; b < m; ++b) Ms(a, b) = M(movable[a], movable[b]);
  }

  // LDLT rather than LLT: no square roots, so a 1-DoF solve is one division.
  Eigen::LDLT<Eigen::MatrixXd> ldlt(Ms);
  if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().minCoeff() > 0.0)) {
    throw std::logic_error("joint-space inertia matrix is singular (a moving link has no mass?)");
  }
  const Eigen::MatrixXd X = ldlt.solve(Js.transpose());
  Eigen::Matrix3d A = Js * X;
  return 0.5 * (A + A.transpose());
}

Eigen::Matrix3d cartesian_ke_matrix_inv(const RobotModel& model, const Eigen::VectorXd& q, std::size_t link,
                                        const Eigen::Vector3d& point) {
  check_link(model, link);
  return cartesian_ke_matrix_inv(model, forward_kinematics(model, q), link, point);
}

double effective_mass(const Eigen::Matrix3d& lambda_v_inv, const Eigen::Vector3d& u) {
  if (std::abs(u.norm() - 1.0) > 1e-9) throw std::invalid_argument("effective_mass: direction not unit");
  const double mobility = u.dot(lambda_v_inv * u);
  if (mobility < kSingularityGuard) return std::numeric_limits<double>::infinity();
  return 1.0 / mobility;
}

double effective_mass(const RobotModel& model, const Frames& frames, std::size_t link,
                      const Eigen::Vector3d& point, const Eigen::Vector3d& u) {
  if (std::abs(u.norm() - 1.0) > 1e-9) throw std::invalid_argument("effective_mass: direction not unit");
  return effective_mass(cartesian_ke_matrix_inv(model, frames, link, point), u);
}

double effective_mass(const RobotModel& model, const Eigen::VectorXd& q, std::size_t link,
                      const Eigen::Vector3d& point, const Eigen::Vector3d& u) {
  return effective_mass(model, forward_kinematics(model, q), link, point, u);
}

double half_mass(const RobotModel& model, std::size_t link) {
  check_link(model, link);
  double sum = 0.0;
  for (std::size_t i = 0; i <= link; ++i) sum += model.links[i].mass;
  return 0.5 * sum;
}

Eigen::Vector3d link_point_velocity(const RobotModel& model, const RobotState& state, std::size_t link,
                                    const Eigen::Vector3d& point) {
  return point_jacobian(model, state.frames(), link, point) * state.qdot();
}

}  // namespace hrc
