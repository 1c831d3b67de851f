#include "fixtures.hpp"
#include "hrc/dynamics.hpp"

#include <Eigen/Eigenvalues>
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace hrc;
using doctest::Approx;

namespace {

const RobotModel& ur10e() {
  static const RobotModel m = load_robot(fixtures::data("ur10e_like.json"));
  return m;
}
const RobotModel& iiwa7() {
  static const RobotModel m = load_robot(fixtures::data("iiwa7_like.json"));
  return m;
}

Matrix3Xd fd_jacobian(const RobotModel& m, const Eigen::VectorXd& q, std::size_t link, const Eigen::Vector3d& p,
                      double h = 1e-6) {
  Matrix3Xd J(3, m.dof());
  for (std::size_t j = 0; j < m.dof(); ++j) {
    Eigen::VectorXd qp = q, qm = q;
    qp[j] += h;
    qm[j] -= h;
    J.col(j) = (forward_kinematics(m, qp)[link] * p - forward_kinematics(m, qm)[link] * p) / (2.0 * h);
  }
  return J;
}

// Σ mᵢ JᵥᵢᵀJᵥᵢ + JωᵢᵀRIᵢRᵀJωᵢ, assembled link by link.
Eigen::MatrixXd inertia_by_jacobians(const RobotModel& m, const Eigen::VectorXd& q) {
  const Frames F = forward_kinematics(m, q);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m.dof(), m.dof());
  for (std::size_t i = 0; i < m.dof(); ++i) {
    const auto& l = m.links[i];
    const Matrix3Xd Jv = point_jacobian(m, F, i, l.com);
    const Matrix3Xd Jw = angular_jacobian(m, F, i);
    const Eigen::Matrix3d R = F[i].linear();
    M += l.mass * Jv.transpose() * Jv + Jw.transpose() * (R * l.inertia * R.transpose()) * Jw;
  }
  return M;
}

}  // namespace

TEST_CASE("forward kinematics") {
  SUBCASE("zero q is the product of joint origins") {
    const RobotModel& m = ur10e();
    const Frames F = forward_kinematics(m, Eigen::VectorXd::Zero(6));
    Eigen::Isometry3d T = Eigen::Isometry3d::Identity();
    for (std::size_t i = 0; i < m.dof(); ++i) {
      T = T * m.joints[i].origin;
      CHECK((F[i].matrix() - T.matrix()).norm() < 1e-12);
    }
  }
  SUBCASE("quarter turn of a single joint") {
    RobotModel m = fixtures::single_revolute();
    m.joints.push_back(fixtures::revolute_z("j2", {1, 0, 0}));
    m.links.push_back(fixtures::link("l2", 1.0, Eigen::Vector3d::Zero()));
    Eigen::VectorXd q(2);
    q << M_PI / 2, 0.0;
    const Eigen::Vector3d child = forward_kinematics(m, q)[1].translation();
    CHECK((child - Eigen::Vector3d(0, 1, 0)).norm() < 1e-12);
  }
  SUBCASE("planar 2R tip") {
    const RobotModel m = fixtures::Planar2R{}.model();
    const Eigen::Vector2d q(M_PI / 2, -M_PI / 2);
    const Eigen::Vector3d tip = forward_kinematics(m, q)[1] * Eigen::Vector3d(1, 0, 0);
    CHECK((tip - Eigen::Vector3d(1, 1, 0)).norm() < 1e-12);
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(forward_kinematics(ur10e(), Eigen::VectorXd::Zero(5)), std::invalid_argument);
  }
}

TEST_CASE("point Jacobian") {
  SUBCASE("single revolute") {
    const RobotModel m = fixtures::single_revolute();
    const Matrix3Xd J = point_jacobian(m, Eigen::VectorXd::Zero(1), 0, Eigen::Vector3d(1, 0, 0));
    CHECK((J - Eigen::Vector3d(0, 1, 0)).norm() < 1e-12);
  }
  SUBCASE("prismatic column is the axis for any q") {
    const RobotModel m = fixtures::prismatic_x();
    for (double x : {-0.7, 0.0, 0.3}) {
      const Matrix3Xd J = point_jacobian(m, Eigen::VectorXd::Constant(1, x), 0, Eigen::Vector3d(0.1, 0.2, 0.3));
      CHECK((J - Eigen::Vector3d(1, 0, 0)).norm() < 1e-15);
    }
  }
  SUBCASE("planar 2R analytic") {
    const fixtures::Planar2R arm;
    const RobotModel m = arm.model();
    const Eigen::Vector2d q(0.3, 1.1);
    const Matrix3Xd J = point_jacobian(m, q, 1, Eigen::Vector3d(arm.l2, 0, 0));
    CHECK((J.topRows(2) - arm.tip_jacobian(q)).norm() < 1e-12);
    CHECK(J.row(2).norm() < 1e-15);
  }
  SUBCASE("distal columns are zero") {
    const Matrix3Xd J = point_jacobian(iiwa7(), Eigen::VectorXd::Constant(7, 0.4), 3, Eigen::Vector3d(0, 0.1, 0));
    CHECK(J.rightCols(3).norm() == 0.0);
  }
  SUBCASE("central finite differences on the bundled models") {
    std::mt19937_64 rng(11);
    for (const RobotModel* m : {&ur10e(), &iiwa7()}) {
      for (int trial = 0; trial < 100; ++trial) {
        const Eigen::VectorXd q = fixtures::random_q(*m, rng);
        const std::size_t link = m->dof() - 1 - (trial % m->dof());
        const Eigen::Vector3d p(0.05, -0.02, 0.1);
        const double err = (point_jacobian(*m, q, link, p) - fd_jacobian(*m, q, link, p)).cwiseAbs().maxCoeff();
        CHECK(err < 1e-5);
      }
    }
  }
  SUBCASE("invalid link") { CHECK_THROWS(point_jacobian(ur10e(), Eigen::VectorXd::Zero(6), 6, Eigen::Vector3d::Zero())); }
}

TEST_CASE("joint-space inertia") {
  SUBCASE("point mass on a single joint") {
    RobotModel m = fixtures::single_revolute(2.0, 0.5);
    CHECK(inertia_matrix(m, Eigen::VectorXd::Zero(1)).M(0, 0) == Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("planar 2R closed form") {
    const fixtures::Planar2R arm{1.2, 0.8, 3.0, 2.0, 0.5, 0.35, 0.4, 0.1};
    const RobotModel m = arm.model();
    std::mt19937_64 rng(5);
    for (int i = 0; i < 50; ++i) {
      const Eigen::Vector2d q = fixtures::random_q(m, rng);
      CHECK((inertia_matrix(m, q).M - arm.inertia(q)).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
  SUBCASE("composite-rigid-body equals the Jacobian assembly; symmetric and PD") {
    std::mt19937_64 rng(7);
    for (const RobotModel* m : {&ur10e(), &iiwa7()}) {
      for (int i = 0; i < 100; ++i) {
        const Eigen::VectorXd q = fixtures::random_q(*m, rng);
        const Eigen::MatrixXd M = inertia_matrix(*m, q).M;
        CHECK((M - M.transpose()).cwiseAbs().maxCoeff() < 1e-9);
        CHECK((M - inertia_by_jacobians(*m, q)).cwiseAbs().maxCoeff() < 1e-9);
        CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(M).eigenvalues().minCoeff() > 0.0);
      }
    }
  }
}

TEST_CASE("Cartesian kinetic-energy matrix and effective mass") {
  SUBCASE("single prismatic joint") {
    const RobotModel m = fixtures::prismatic_x(3.0);
    const Eigen::VectorXd q = Eigen::VectorXd::Zero(1);
    const Eigen::Matrix3d A = cartesian_ke_matrix_inv(m, q, 0, Eigen::Vector3d::Zero());
    Eigen::Matrix3d expected = Eigen::Matrix3d::Zero();
    expected(0, 0) = 1.0 / 3.0;
    CHECK((A - expected).norm() < 1e-15);
    CHECK(effective_mass(m, q, 0, Eigen::Vector3d::Zero(), Eigen::Vector3d::UnitX()) == 3.0);
    CHECK(effective_mass(m, q, 0, Eigen::Vector3d::Zero(), Eigen::Vector3d::UnitY()) ==
          std::numeric_limits<double>::infinity());
  }
  SUBCASE("non-unit direction") {
    const RobotModel m = fixtures::prismatic_x(3.0);
    CHECK_THROWS_AS(effective_mass(m, Eigen::VectorXd::Zero(1), 0, Eigen::Vector3d::Zero(), Eigen::Vector3d(2, 0, 0)),
                    std::invalid_argument);
  }
  SUBCASE("planar 2R equals J M⁻¹ Jᵀ from the analytic oracle") {
    const fixtures::Planar2R arm{1.0, 0.7, 2.0, 1.5, 0.45, 0.3, 0.2, 0.05};
    const RobotModel m = arm.model();
    std::mt19937_64 rng(9);
    for (int i = 0; i < 20; ++i) {
      Eigen::Vector2d q = fixtures::random_q(m, rng);
      if (std::abs(std::sin(q[1])) < 0.2) q[1] = 1.0;  // stay away from the stretched singularity
      const Eigen::Matrix2d J = arm.tip_jacobian(q);
      const Eigen::Matrix2d oracle = J * arm.inertia(q).inverse() * J.transpose();
      const Eigen::Matrix3d A = cartesian_ke_matrix_inv(m, q, 1, Eigen::Vector3d(arm.l2, 0, 0));
      CHECK((A.topLeftCorner<2, 2>() - oracle).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
  SUBCASE("symmetry, sign invariance and the kinetic-energy bound") {
    std::mt19937_64 rng(13);
    std::normal_distribution<double> n01;
    for (const RobotModel* m : {&ur10e(), &iiwa7()}) {
      for (int i = 0; i < 100; ++i) {
        const Eigen::VectorXd q = fixtures::random_q(*m, rng);
        const std::size_t link = 1 + i % (m->dof() - 1);
        const Eigen::Vector3d p(0.03, 0.0, 0.05);
        const Eigen::Matrix3d A = cartesian_ke_matrix_inv(*m, q, link, p);
        CHECK((A - A.transpose()).cwiseAbs().maxCoeff() < 1e-9);

        Eigen::VectorXd qdot(m->dof());
        for (auto& x : qdot) x = n01(rng);
        const RobotState st(*m, q, qdot);
        const Eigen::Vector3d v = link_point_velocity(*m, st, link, p);
        const Eigen::Vector3d u = v.normalized();
        const double mu = effective_mass(A, u);
        CHECK(mu == effective_mass(A, -u));
        const double ke = 0.5 * qdot.dot(inertia_matrix(*m, q).M * qdot);
        CHECK(ke >= 0.5 * mu * v.squaredNorm() * (1.0 - 1e-9));
      }
    }
  }
}

TEST_CASE("half mass") {
  RobotModel m = fixtures::Planar2R{1, 1, 2.0, 4.0}.model();
  CHECK(half_mass(m, 1) == 3.0);
  CHECK(half_mass(m, 0) == 1.0);
  const RobotModel& ur = ur10e();
  double total = 0.0;
  for (const auto& l : ur.links) total += l.mass;
  CHECK(half_mass(ur, 5) == Approx(0.5 * total).epsilon(1e-12));
  CHECK_THROWS(half_mass(ur, 6));
}

TEST_CASE("link point velocity") {
  SUBCASE("zero joint velocity") {
    const RobotState st(ur10e(), Eigen::VectorXd::Constant(6, 0.3), Eigen::VectorXd::Zero(6));
    CHECK(link_point_velocity(ur10e(), st, 4, Eigen::Vector3d(0.1, 0, 0)).norm() == 0.0);
  }
  SUBCASE("single revolute") {
    const RobotModel m = fixtures::single_revolute();
    const RobotState st(m, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1));
    CHECK((link_point_velocity(m, st, 0, Eigen::Vector3d(1, 0, 0)) - Eigen::Vector3d(0, 1, 0)).norm() < 1e-12);
  }
  SUBCASE("finite difference along a joint trajectory") {
    const RobotModel& m = iiwa7();
    const double h = 1e-4;
    auto q_of = [](double t) {
      Eigen::VectorXd q(7);
      for (int j = 0; j < 7; ++j) q[j] = 0.4 * std::sin(0.7 * t + j) + 0.1 * j;
      return q;
    };
    for (double t = 0.0; t < 2.0; t += 0.25) {
      const Eigen::VectorXd qdot = (q_of(t + h) - q_of(t - h)) / (2 * h);
      const RobotState st(m, q_of(t), qdot);
      const Eigen::Vector3d p(0, 0, 0.1);
      const Eigen::Vector3d fd = (forward_kinematics(m, q_of(t + h))[6] * p - forward_kinematics(m, q_of(t - h))[6] * p) / (2 * h);
      CHECK((link_point_velocity(m, st, 6, p) - fd).norm() < 1e-4);
    }
  }
}
