// Deterministic fixed-step task simulator.
//
// The arm is kinematic and velocity controlled: it follows the Cartesian task
// script through damped least squares and never yields to contact. Buckets are
// planar pendulums receiving plastic impulses from the arm; the clamp device is
// a spring whose compression equals the arm's penetration into it.
#pragma once

#include "hrc/dynamics.hpp"
#include "hrc/model.hpp"
#include "hrc/policy.hpp"
#include "hrc/sensing.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace hrc {

struct PendulumParams {
  double length = 0.64;  // m
  double mass = 5.6;     // kg
  double gravity = kDefaultGravity;
};

struct BucketState {
  double theta = 0.0;      // rad from vertical
  double theta_dot = 0.0;  // rad/s
  Eigen::Vector3d plane_normal = -Eigen::Vector3d::UnitX();

  /// Horizontal unit vector along which positive theta swings the bob.
  Eigen::Vector3d swing_direction() const { return plane_normal.cross(Eigen::Vector3d::UnitZ()); }
  /// Unit tangent of the bob path at theta.
  Eigen::Vector3d tangent() const;
  Eigen::Vector3d bob_position(const Eigen::Vector3d& anchor, double length) const;
  double energy(const PendulumParams& p) const;
  bool at_rest() const { return std::abs(theta) < 1e-6 && std::abs(theta_dot) < 1e-6; }
};

/// One step of the free pendulum. An impulse (N·s, along the path tangent)
/// applied at the bob first changes theta_dot by impulse/(m·L). Integration
/// is velocity Verlet (kick-drift-kick).
BucketState step_bucket(const BucketState& b, const PendulumParams& p, double dt,
                        std::optional<double> impulse = std::nullopt);

struct ClampState {
  double compression = 0.0;     // m
  double measured_force = 0.0;  // N
};

struct JitterConfig {
  double sigma_pose = 0.002;     // m, segment-start reference offset
  double sigma_latency = 0.005;  // s, detection latency (half-normal)
};

struct SimConfig {
  double dt = 0.001;
  double stop_hold = 1.0;
  double cartesian_speed = 0.4;
  std::uint64_t rng_seed = 0;
  JitterConfig jitter;
  double skin_detection_period = 0.033;  // s
  double torque_detection_period = 0.0;  // s, 0 = every step
  double residual_epsilon = kDefaultResidualEpsilon;
  double dls_damping = 0.01;
  double position_gain = 10.0;     // 1/s
  double orientation_gain = 5.0;   // 1/s
  double contact_hysteresis = 0.001;  // m separation that ends a contact
  double timeout = 120.0;          // simulated s
  double trajectory_sample_period = 0.0;  // s, 0 = do not record
  PolicyParams policy;
};

enum class SimEventKind { contact, stop, resume, segment_start, segment_end, task_end, diagnostic };
const char* to_string(SimEventKind k);

struct SimEvent {
  double time = 0.0;
  SimEventKind kind = SimEventKind::diagnostic;
  std::optional<ContactEvent> contact;
  std::optional<PolicyDecision> decision;
  std::optional<std::size_t> segment;
  std::string message;
};

enum class ControlMode { tracking, stopped, holding };
const char* to_string(ControlMode m);

struct ControllerState {
  ControlMode mode = ControlMode::tracking;
  double hold_until = 0.0;
  std::size_t current_segment = 0;
  double segment_progress = 0.0;  // m along the current segment
};

struct ContactRecord {
  double time = 0.0;
  std::string obstacle;
  ContactClass contact_class = ContactClass::transient;
  std::size_t link = 0;
  std::optional<int> pad;
  double speed = 0.0;
  double estimated_force = 0.0;
  double m_R_used = 0.0;
  MassModel mass_model = MassModel::none;
  Reaction reaction = Reaction::STOP;
  std::optional<double> measured_force;  // clamp peak of the contact episode
};

/// First impulse of a bucket contact episode.
struct ImpactRecord {
  std::string bucket;
  double time = 0.0;
  double effective_mass = 0.0;    // arm, along the push direction
  double contact_speed = 0.0;     // arm contact point, pre-impact
  double impulse = 0.0;           // momentum given to the bob along its path, N·s
  double bob_speed_before = 0.0;  // L·theta_dot before the step
  double bob_speed_after = 0.0;   // L·theta_dot after the step
  double bucket_energy_before = 0.0;
  double bucket_energy_after = 0.0;
  double contact_kinetic_energy = 0.0;  // ½ m_u v² of the arm contact point
};

/// Interval of geometric overlap between the arm and one obstacle.
struct OverlapInterval {
  std::string obstacle;
  double begin = 0.0;
  double end = -1.0;  // < begin while still open
  int detections = 0; // contact events whose onset fell in this interval
  double peak_force = 0.0;  // clamp only
};

struct ExperimentRecord {
  PolicyKind policy = PolicyKind::FACTORY;
  double speed = 0.0;
  std::uint64_t seed = 0;
  bool success = false;
  std::string failure;
  double task_time = 0.0;
  int stop_count = 0;
  std::vector<ContactRecord> contacts;
  std::vector<SimEvent> events;
  std::vector<ImpactRecord> impacts;
  std::vector<OverlapInterval> overlaps;
  std::vector<Eigen::VectorXd> trajectory;  // sampled q, if requested
  double clamp_peak_force = 0.0;
};

/// Damped least-squares map of a tool-point velocity to joint velocities,
/// uniformly scaled into the joint velocity limits.
Eigen::VectorXd cartesian_to_joint_velocity(const RobotModel& model, const RobotState& state,
                                            const Eigen::Vector3d& v_des, double damping = 0.01);
/// Same for a full twist (tool-point linear velocity plus angular velocity).
Eigen::VectorXd cartesian_twist_to_joint_velocity(const RobotModel& model, const RobotState& state,
                                                  const Eigen::Vector3d& v_des, const Eigen::Vector3d& w_des,
                                                  double damping = 0.01);

Eigen::Vector3d tool_position(const RobotModel& model, const Frames& frames);

class World {
 public:
  World(const RobotModel& model, const ScenarioConfig& scenario, PolicyKind policy, SimConfig config);

  /// Advance by dt (normally config.dt); returns the events emitted.
  std::vector<SimEvent> step(double dt);
  bool finished() const { return finished_; }

  double time() const { return time_; }
  const RobotState& robot() const { return robot_; }
  const ControllerState& controller() const { return controller_; }
  const std::vector<BucketState>& buckets() const { return buckets_; }
  const ClampState& clamp() const { return clamp_; }
  const ExperimentRecord& record() const { return record_; }
  ExperimentRecord take_record() { return std::move(record_); }
  const std::vector<Obstacle>& obstacles() const { return obstacles_; }

 private:
  struct Latch {
    bool active = false;
  };
  struct Pending {
    double due = 0.0;
    double onset = 0.0;
    std::optional<int> pad;
    std::size_t obstacle = 0;
    std::size_t onset_segment = 0;
    std::size_t interval = 0;
    Proximity proximity;
    // Ground-truth force sample for the torque channel.
    std::size_t true_link = 0;
    Eigen::Vector3d true_point_link = Eigen::Vector3d::Zero();
    Eigen::Vector3d force = Eigen::Vector3d::Zero();
  };
  struct Deepest {
    Proximity prox;
    std::size_t link = 0;
    bool found = false;
  };
  struct EpisodeState {
    bool active = false;
    std::size_t interval = 0;
    bool impacted = false;
    Eigen::Vector3d last_force = Eigen::Vector3d::Zero();
  };

  void start_segment(std::size_t index, std::vector<SimEvent>& out);
  Eigen::VectorXd controller_velocity(double dt);
  void update_obstacles();
  Deepest deepest_contact(const Obstacle& ob) const;
  void bucket_physics(double dt);
  void clamp_physics();
  void track_episodes();
  void schedule_skin_detections();
  void schedule_torque_detections();
  double detection_due(double period);
  void process_detections(std::vector<SimEvent>& out);
  void emit(SimEvent ev, std::vector<SimEvent>& out);
  void fail(const std::string& why, std::vector<SimEvent>& out);

  const RobotModel* model_;
  const ScenarioConfig* scenario_;
  PolicyKind policy_;
  SimConfig config_;
  std::mt19937_64 rng_;

  RobotState robot_;
  ControllerState controller_;
  std::vector<BucketState> buckets_;
  std::vector<PendulumParams> pendulums_;
  ClampState clamp_;
  std::vector<Obstacle> obstacles_;  // buckets first, then the clamp
  std::size_t clamp_index_ = 0;
  bool has_clamp_ = false;

  Eigen::Vector3d nominal_start_ = Eigen::Vector3d::Zero();
  Eigen::Vector3d reference_start_ = Eigen::Vector3d::Zero();
  Eigen::Matrix3d reference_orientation_ = Eigen::Matrix3d::Identity();
  std::optional<std::size_t> skip_after_hold_;

  std::vector<EpisodeState> episodes_;           // per obstacle
  std::vector<Deepest> deepest_;                 // per obstacle, this step
  std::vector<Eigen::Vector3d> contact_force_;   // per obstacle, on the arm, this step
  std::vector<Latch> pad_latches_;               // pad-major: pad * obstacles + obstacle
  std::vector<Pending> pending_;
  std::vector<std::size_t> clamp_contact_rows_;  // contacts awaiting the episode peak
  ExperimentRecord record_;

  double time_ = 0.0;
  double next_sample_ = 0.0;
  bool finished_ = false;
};

ExperimentRecord run_task(const RobotModel& model, const ScenarioConfig& scenario, PolicyKind policy,
                          const SimConfig& config);

/// One JSON object per line.
void write_event_log(std::ostream& os, const std::vector<SimEvent>& events);

}  // namespace hrc
