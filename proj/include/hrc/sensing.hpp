// Collision detection and isolation: skin-pad contact geometry and
// joint-torque residuals.
#pragma once

#include "hrc/dynamics.hpp"
#include "hrc/geometry.hpp"
#include "hrc/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hrc {

enum class ContactClass { transient, quasi_static };

const char* to_string(ContactClass c);

struct ContactEvent {
  double time = 0.0;
  std::size_t link = 0;
  std::optional<int> pad;
  Eigen::Vector3d point_world = Eigen::Vector3d::Zero();  // deepest-penetration point
  Eigen::Vector3d point_link = Eigen::Vector3d::Zero();   // representative point, link frame
  ContactClass contact_class = ContactClass::transient;
  std::string obstacle;
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();  // world, obstacle -> robot
};

struct ResidualVector {
  Eigen::VectorXd tau_ext;
};

/// World geometry the robot can touch: a sphere (bucket bob) or an oriented box
/// (clamp device).
struct Obstacle {
  enum class Shape { sphere, box };
  std::string name;
  Shape shape = Shape::sphere;
  ContactClass contact_class = ContactClass::transient;
  Eigen::Vector3d center = Eigen::Vector3d::Zero();  // sphere centre
  double radius = 0.0;
  geom::OrientedBox box;

  static Obstacle sphere(std::string name, const Eigen::Vector3d& center, double radius, ContactClass c);
  static Obstacle make_box(std::string name, const geom::OrientedBox& box, ContactClass c);
  /// Radius of a sphere enclosing the obstacle, around bounding_center().
  double bounding_radius() const;
  Eigen::Vector3d bounding_center() const;
};

/// Signed proximity between a robot surface region and an obstacle.
struct Proximity {
  double penetration = -1e9;  // > 0 when overlapping (m)
  Eigen::Vector3d point = Eigen::Vector3d::Zero();   // robot surface point nearest/deepest
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ(); // obstacle -> robot
};

/// Proximity of one capsule sub-segment [t0,t1] (world endpoints a,b) to an
/// obstacle. Returns nullopt when certainly farther than `cutoff`.
std::optional<Proximity> capsule_proximity(const Eigen::Vector3d& a, const Eigen::Vector3d& b, double radius,
                                           const Obstacle& obstacle, double cutoff = 0.05);

/// Proximity of a pad's surface patch to an obstacle, honouring the pad's
/// angular sector. nullopt when farther than `cutoff` or outside the sector.
std::optional<Proximity> pad_proximity(const RobotModel& model, const Frames& frames, const SkinPad& pad,
                                       const Obstacle& obstacle, double cutoff = 0.05);

/// Midpoint of the pad's surface patch in its link frame.
Eigen::Vector3d pad_representative_point(const RobotModel& model, const SkinPad& pad);
/// Point used for a link when only the link is known (torque sensing):
/// midpoint of its first capsule, or the link origin.
Eigen::Vector3d link_representative_point(const RobotModel& model, std::size_t link);

/// One event per pad overlapping an obstacle (deepest obstacle wins), ordered
/// by pad id.
std::vector<ContactEvent> detect_skin(const RobotModel& model, const RobotState& state,
                                      const std::vector<Obstacle>& obstacles, double time = 0.0);

/// tau_ext = Jᵀ f_ext for a force applied at `point` (link frame) on `link`.
ResidualVector synth_residual(const RobotModel& model, const RobotState& state, const Eigen::Vector3d& f_ext,
                              std::size_t link, const Eigen::Vector3d& point);

inline constexpr double kDefaultResidualEpsilon = 0.1;  // N·m

/// Most distal joint whose |tau_ext| exceeds epsilon; that joint's link is
/// the contacted one.
std::optional<std::size_t> isolate_from_residual(const ResidualVector& residual,
                                                 double epsilon = kDefaultResidualEpsilon);

}  // namespace hrc
