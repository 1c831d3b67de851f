// Robot and scenario description: data model, JSON loading and validation.
#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hrc {

/// Malformed document (not JSON, wrong types, missing keys).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Well-formed document that violates a model invariant. The message always
/// starts with the offending field path, e.g. "joints[0].axis: axis not unit".
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// File could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class JointKind { revolute, prismatic, fixed };
enum class SensingMode { skin_pads, joint_torque };

struct JointSpec {
  std::string name;
  JointKind kind = JointKind::revolute;
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();  // in the joint frame after `origin`
  Eigen::Isometry3d origin = Eigen::Isometry3d::Identity();  // parent link frame -> joint frame
  double position_min = -M_PI;
  double position_max = M_PI;
  double velocity_limit = 1.0;
};

struct Capsule {
  Eigen::Vector3d p0 = Eigen::Vector3d::Zero();
  Eigen::Vector3d p1 = Eigen::Vector3d::Zero();
  double radius = 0.05;
};

struct LinkSpec {
  std::string name;
  double mass = 0.0;
  Eigen::Vector3d com = Eigen::Vector3d::Zero();
  Eigen::Matrix3d inertia = Eigen::Matrix3d::Zero();  // about com, link frame
  std::vector<Capsule> collision_geometry;
};

/// Part of a capsule's surface covered by one skin pad: axial interval
/// [t0, t1] of the capsule axis and an angular sector [phi_min, phi_max]
/// measured around the axis (see capsule_reference_frame).
struct SurfacePatch {
  std::size_t capsule = 0;
  double t0 = 0.0;
  double t1 = 1.0;
  double phi_min = -M_PI;
  double phi_max = M_PI;

  bool full_circle() const { return phi_max - phi_min >= 2.0 * M_PI - 1e-12; }
};

struct SkinPad {
  int id = 0;
  std::size_t link = 0;
  SurfacePatch surface_patch;
};

struct RobotModel {
  std::string name;
  std::vector<JointSpec> joints;  // base -> tip
  std::vector<LinkSpec> links;    // links[i] is moved by joints[i]
  std::vector<SkinPad> pads;
  SensingMode sensing_mode = SensingMode::skin_pads;
  Eigen::Vector3d tool_point = Eigen::Vector3d::Zero();  // in the last link frame

  std::size_t dof() const { return joints.size(); }
  const SkinPad& pad(int id) const;
};

struct BucketSpec {
  std::string name;
  Eigen::Vector3d anchor = Eigen::Vector3d::Zero();
  double string_length = 0.64;
  double mass = 5.6;
  double bob_radius = 0.1;
};

struct ClampSpec {
  std::string name = "clamp";
  Eigen::Vector3d position = Eigen::Vector3d::Zero();  // centre of the contact face
  Eigen::Vector3d half_extents{0.05, 0.05, 0.05};      // lateral, lateral, depth
  double stiffness = 30000.0;
  Eigen::Vector3d contact_normal = Eigen::Vector3d::UnitZ();
};

struct TaskSegment {
  Eigen::Vector3d direction = Eigen::Vector3d::UnitX();
  double distance = 0.0;
  std::optional<double> speed_cap;
};

inline constexpr double kDefaultSpringConstant = 75000.0;  // N/m, back of the hand
inline constexpr double kDefaultHumanMass = 5.6;           // kg, whole arm
inline constexpr double kDefaultGravity = 9.81;

struct ScenarioConfig {
  std::string name;
  std::vector<double> start_configuration;
  std::vector<BucketSpec> buckets;
  std::optional<ClampSpec> clamp;
  std::vector<TaskSegment> task_script;
  double spring_constant = kDefaultSpringConstant;
  double human_mass = kDefaultHumanMass;
  double gravity = kDefaultGravity;
};

RobotModel parse_robot(const std::string& json_text);
RobotModel load_robot(const std::filesystem::path& path);
std::string serialize_robot(const RobotModel& model);
/// Throws ValidationError on the first violated invariant.
void validate(const RobotModel& model);

ScenarioConfig parse_scenario(const std::string& json_text);
ScenarioConfig load_scenario(const std::filesystem::path& path);
void validate(const ScenarioConfig& scenario);
/// Checks that the scenario fits the robot (start configuration length and limits).
void validate_pair(const RobotModel& model, const ScenarioConfig& scenario);

std::string read_text_file(const std::filesystem::path& path);

const char* to_string(JointKind kind);
const char* to_string(SensingMode mode);

}  // namespace hrc
