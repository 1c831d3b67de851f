#include "hrc/simworld.hpp"

#include <json.hpp>

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace hrc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::VectorXd dls_solve(const Eigen::MatrixXd& J, const Eigen::VectorXd& task, double damping) {
  Eigen::MatrixXd A = J * J.transpose();
  A.diagonal().array() += damping * damping;
  return J.transpose() * A.ldlt().solve(task);
}

Eigen::VectorXd scale_to_limits(const RobotModel& model, Eigen::VectorXd qdot) {
  double s = 1.0;
  for (std::size_t i = 0; i < model.dof(); ++i) {
    s = std::max(s, std::abs(qdot[static_cast<Eigen::Index>(i)]) / model.joints[i].velocity_limit);
  }
  if (s > 1.0) qdot /= s;
  return qdot;
}

nlohmann::json vec_json(const Eigen::Vector3d& v) { return nlohmann::json::array({v.x(), v.y(), v.z()}); }

}  // namespace

const char* to_string(SimEventKind k) {
  switch (k) {
    case SimEventKind::contact: return "contact";
    case SimEventKind::stop: return "stop";
    case SimEventKind::resume: return "resume";
    case SimEventKind::segment_start: return "segment_start";
    case SimEventKind::segment_end: return "segment_end";
    case SimEventKind::task_end: return "task_end";
    case SimEventKind::diagnostic: return "diagnostic";
  }
  return "?";
}

const char* to_string(ControlMode m) {
  switch (m) {
    case ControlMode::tracking: return "tracking";
    case ControlMode::stopped: return "stopped";
    case ControlMode::holding: return "holding";
  }
  return "?";
}

Eigen::Vector3d BucketState::tangent() const {
  return std::cos(theta) * swing_direction() + std::sin(theta) * Eigen::Vector3d::UnitZ();
}

Eigen::Vector3d BucketState::bob_position(const Eigen::Vector3d& anchor, double length) const {
  return anchor + length * (std::sin(theta) * swing_direction() - std::cos(theta) * Eigen::Vector3d::UnitZ());
}

double BucketState::energy(const PendulumParams& p) const {
  const double v = p.length * theta_dot;
  return 0.5 * p.mass * v * v + p.mass * p.gravity * p.length * (1.0 - std::cos(theta));
}

BucketState step_bucket(const BucketState& b, const PendulumParams& p, double dt, std::optional<double> impulse) {
  BucketState out = b;
  if (impulse) out.theta_dot += *impulse / (p.mass * p.length);
  const double w2 = p.gravity / p.length;
  out.theta_dot -= 0.5 * dt * w2 * std::sin(out.theta);
  out.theta += dt * out.theta_dot;
  out.theta_dot -= 0.5 * dt * w2 * std::sin(out.theta);
  return out;
}

Eigen::Vector3d tool_position(const RobotModel& model, const Frames& frames) {
  return frames.back() * model.tool_point;
}

Eigen::VectorXd cartesian_to_joint_velocity(const RobotModel& model, const RobotState& state,
                                            const Eigen::Vector3d& v_des, double damping) {
  const std::size_t tip = model.dof() - 1;
  const Eigen::MatrixXd J = point_jacobian(model, state.frames(), tip, model.tool_point);
  return scale_to_limits(model, dls_solve(J, v_des, damping));
}

Eigen::VectorXd cartesian_twist_to_joint_velocity(const RobotModel& model, const RobotState& state,
                                                  const Eigen::Vector3d& v_des, const Eigen::Vector3d& w_des,
                                                  double damping) {
  const std::size_t tip = model.dof() - 1;
  Eigen::MatrixXd J(6, static_cast<Eigen::Index>(model.dof()));
  J.topRows(3) = point_jacobian(model, state.frames(), tip, model.tool_point);
  J.bottomRows(3) = angular_jacobian(model, state.frames(), tip);
  Eigen::VectorXd task(6);
  task << v_des, w_des;
  return scale_to_limits(model, dls_solve(J, task, damping));
}

World::World(const RobotModel& model, const ScenarioConfig& scenario, PolicyKind policy, SimConfig config)
    : model_(&model),
      scenario_(&scenario),
      policy_(policy),
      config_(config),
      rng_(config.rng_seed),
      robot_(model) {
  validate_pair(model, scenario);
  if (!(config_.dt > 0.0)) throw ValidationError("SimConfig.dt", "must be positive");
  if (!(config_.stop_hold > 0.0)) throw ValidationError("SimConfig.stop_hold", "must be positive");
  if (!(config_.cartesian_speed > 0.0)) throw ValidationError("SimConfig.cartesian_speed", "must be positive");

  Eigen::VectorXd q0(static_cast<Eigen::Index>(model.dof()));
  for (std::size_t i = 0; i < model.dof(); ++i) q0[static_cast<Eigen::Index>(i)] = scenario.start_configuration[i];
  robot_.set_q(q0);

  for (const auto& b : scenario.buckets) {
    buckets_.push_back(BucketState{});
    pendulums_.push_back(PendulumParams{b.string_length, b.mass, scenario.gravity});
    obstacles_.push_back(Obstacle::sphere(b.name, Eigen::Vector3d::Zero(), b.bob_radius, ContactClass::transient));
  }
  if (scenario.clamp) {
    const auto& c = *scenario.clamp;
    has_clamp_ = true;
    clamp_index_ = obstacles_.size();
    obstacles_.push_back(Obstacle::make_box(c.name, geom::box_behind_face(c.position, c.contact_normal, c.half_extents),
                                            ContactClass::quasi_static));
  }
  update_obstacles();

  episodes_.assign(obstacles_.size(), EpisodeState{});
  deepest_.assign(obstacles_.size(), Deepest{});
  contact_force_.assign(obstacles_.size(), Eigen::Vector3d::Zero());
  pad_latches_.assign(model.pads.size() * obstacles_.size(), Latch{});

  record_.policy = policy;
  record_.speed = config_.cartesian_speed;
  record_.seed = config_.rng_seed;

  nominal_start_ = tool_position(model, robot_.frames());
  reference_orientation_ = robot_.frames().back().linear();
  if (config_.trajectory_sample_period > 0.0) record_.trajectory.push_back(robot_.q());
  next_sample_ = config_.trajectory_sample_period;

  std::vector<SimEvent> initial;
  if (scenario.task_script.empty()) {
    finished_ = true;
    record_.success = true;
    emit(SimEvent{0.0, SimEventKind::task_end, {}, {}, {}, "empty task script"}, initial);
  } else {
    start_segment(0, initial);
  }
}

void World::emit(SimEvent ev, std::vector<SimEvent>& out) {
  record_.events.push_back(ev);
  out.push_back(std::move(ev));
}

void World::fail(const std::string& why, std::vector<SimEvent>& out) {
  emit(SimEvent{time_, SimEventKind::diagnostic, {}, {}, controller_.current_segment, why}, out);
  record_.success = false;
  record_.failure = why;
  finished_ = true;
}

void World::start_segment(std::size_t index, std::vector<SimEvent>& out) {
  const TaskSegment& seg = scenario_->task_script[index];
  Eigen::Vector3d e1, e2;
  geom::perpendicular_basis(seg.direction, e1, e2);
  std::normal_distribution<double> noise(0.0, 1.0);
  const double s = config_.jitter.sigma_pose;
  const double j1 = s > 0.0 ? s * noise(rng_) : 0.0;
  const double j2 = s > 0.0 ? s * noise(rng_) : 0.0;
  reference_start_ = nominal_start_ + j1 * e1 + j2 * e2;
  controller_.current_segment = index;
  controller_.segment_progress = 0.0;
  emit(SimEvent{time_, SimEventKind::segment_start, {}, {}, index, {}}, out);
}

void World::update_obstacles() {
  for (std::size_t b = 0; b < buckets_.size(); ++b) {
    const auto& spec = scenario_->buckets[b];
    obstacles_[b].center = buckets_[b].bob_position(spec.anchor, spec.string_length);
  }
}

Eigen::VectorXd World::controller_velocity(double dt) {
  const TaskSegment& seg = scenario_->task_script[controller_.current_segment];
  double speed = config_.cartesian_speed;
  if (seg.speed_cap) speed = std::min(speed, *seg.speed_cap);

  const Eigen::Vector3d p_ref = reference_start_ + seg.direction * controller_.segment_progress;
  const double step_len = std::min(speed * dt, seg.distance - controller_.segment_progress);
  controller_.segment_progress += step_len;

  const Frames& frames = robot_.frames();
  const Eigen::Vector3d p = tool_position(*model_, frames);
  const Eigen::Vector3d v = seg.direction * (step_len / dt) + config_.position_gain * (p_ref - p);
  const Eigen::AngleAxisd err(reference_orientation_ * frames.back().linear().transpose());
  const Eigen::Vector3d w = config_.orientation_gain * err.angle() * err.axis();
  return cartesian_twist_to_joint_velocity(*model_, robot_, v, w, config_.dls_damping);
}

World::Deepest World::deepest_contact(const Obstacle& ob) const {
  Deepest best;
  const Frames& frames = robot_.frames();
  for (std::size_t l = 0; l < model_->links.size(); ++l) {
    for (const auto& cap : model_->links[l].collision_geometry) {
      auto prox = capsule_proximity(frames[l] * cap.p0, frames[l] * cap.p1, cap.radius, ob,
                                    config_.contact_hysteresis * 2.0);
      if (prox && (!best.found || prox->penetration > best.prox.penetration)) {
        best.prox = *prox;
        best.link = l;
        best.found = true;
      }
    }
  }
  return best;
}

void World::bucket_physics(double dt) {
  const Frames& frames = robot_.frames();
  for (std::size_t b = 0; b < buckets_.size(); ++b) {
    const PendulumParams& pend = pendulums_[b];
    Deepest deep = deepest_contact(obstacles_[b]);
    deepest_[b] = deep;
    contact_force_[b].setZero();

    std::optional<double> impulse;
    std::optional<ImpactRecord> impact;
    if (deep.found && deep.prox.penetration > 0.0) {
      const Eigen::Vector3d push = -deep.prox.normal;  // arm -> bob
      BucketState& bs = buckets_[b];
      if (bs.at_rest()) {
        Eigen::Vector3d h = push - push.z() * Eigen::Vector3d::UnitZ();
        if (h.norm() > 0.1) bs.plane_normal = Eigen::Vector3d::UnitZ().cross(h.normalized());
      }
      const Eigen::Vector3d t = bs.tangent();
      const Eigen::Vector3d point_link = frames[deep.link].inverse() * deep.prox.point;
      const Eigen::Vector3d v_p = point_jacobian(*model_, frames, deep.link, point_link) * robot_.qdot();
      const Eigen::Vector3d v_b = pend.length * bs.theta_dot * t;
      const double approach = (v_p - v_b).dot(push);
      if (approach > 0.0) {
        const double tn = t.dot(push);
        const double m_u = effective_mass(*model_, frames, deep.link, point_link, push);
        const double inv_mu = std::isinf(m_u) ? 0.0 : 1.0 / m_u;
        const double denom = inv_mu + tn * tn / pend.mass;
        if (denom > 1e-12) {
          const double j = approach / denom;
          impulse = j * tn;
          contact_force_[b] = -j * push / dt;
          if (!episodes_[b].impacted) {
            episodes_[b].impacted = true;
            ImpactRecord r;
            r.bucket = obstacles_[b].name;
            r.time = time_ + dt;
            r.effective_mass = m_u;
            r.contact_speed = v_p.norm();
            r.impulse = *impulse;
            r.bob_speed_before = pend.length * bs.theta_dot;
            r.bucket_energy_before = bs.energy(pend);
            r.contact_kinetic_energy = std::isinf(m_u) ? kInf : 0.5 * m_u * v_p.squaredNorm();
            impact = r;
          }
        }
      }
    }
    buckets_[b] = step_bucket(buckets_[b], pend, dt, impulse);
    if (impact) {
      impact->bob_speed_after = pend.length * buckets_[b].theta_dot;
      impact->bucket_energy_after = buckets_[b].energy(pend);
      record_.impacts.push_back(*impact);
    }
  }
}

void World::clamp_physics() {
  if (!has_clamp_) return;
  const Deepest deep = deepest_contact(obstacles_[clamp_index_]);
  deepest_[clamp_index_] = deep;
  const double compression = deep.found ? std::max(0.0, deep.prox.penetration) : 0.0;
  clamp_.compression = compression;
  clamp_.measured_force = scenario_->clamp->stiffness * compression;
  contact_force_[clamp_index_] = clamp_.measured_force * scenario_->clamp->contact_normal;
  record_.clamp_peak_force = std::max(record_.clamp_peak_force, clamp_.measured_force);
}

void World::track_episodes() {
  for (std::size_t o = 0; o < obstacles_.size(); ++o) {
    const double pen = deepest_[o].found ? deepest_[o].prox.penetration : -kInf;
    EpisodeState& ep = episodes_[o];
    if (!ep.active && pen > 0.0) {
      ep.active = true;
      ep.interval = record_.overlaps.size();
      record_.overlaps.push_back(OverlapInterval{obstacles_[o].name, time_, -1.0, 0, 0.0});
    }
    if (!ep.active) continue;
    auto& interval = record_.overlaps[ep.interval];
    if (has_clamp_ && o == clamp_index_) interval.peak_force = std::max(interval.peak_force, clamp_.measured_force);
    if (pen < -config_.contact_hysteresis) {
      ep.active = false;
      ep.impacted = false;
      interval.end = time_;
      if (has_clamp_ && o == clamp_index_) {
        for (std::size_t row : clamp_contact_rows_) {
          auto& c = record_.contacts[row];
          if (!c.measured_force) c.measured_force = interval.peak_force;
        }
        clamp_contact_rows_.clear();
      }
    }
  }
}

double World::detection_due(double period) {
  double latency = 0.0;
  if (config_.jitter.sigma_latency > 0.0) {
    std::normal_distribution<double> noise(0.0, config_.jitter.sigma_latency);
    latency = std::abs(noise(rng_));
  }
  double tick = time_;
  if (period > 0.0) tick = std::ceil(time_ / period - 1e-9) * period;
  return tick + latency;
}

void World::schedule_skin_detections() {
  const std::size_t nob = obstacles_.size();
  for (std::size_t pi = 0; pi < model_->pads.size(); ++pi) {
    const SkinPad& pad = model_->pads[pi];
    for (std::size_t o = 0; o < nob; ++o) {
      Latch& latch = pad_latches_[pi * nob + o];
      if (!latch.active && !episodes_[o].active) continue;  // pads are parts of capsules
      auto prox = pad_proximity(*model_, robot_.frames(), pad, obstacles_[o], config_.contact_hysteresis * 2.0);
      const double pen = prox ? prox->penetration : -kInf;
      if (!latch.active && pen > 0.0) {
        latch.active = true;
        Pending p;
        p.due = detection_due(config_.skin_detection_period);
        p.onset = time_;
        p.pad = pad.id;
        p.obstacle = o;
        p.onset_segment = controller_.current_segment;
        p.interval = episodes_[o].interval;
        p.proximity = *prox;
        pending_.push_back(p);
      } else if (latch.active && pen < -config_.contact_hysteresis) {
        latch.active = false;
      }
    }
  }
}

void World::schedule_torque_detections() {
  for (std::size_t o = 0; o < obstacles_.size(); ++o) {
    const EpisodeState& ep = episodes_[o];
    if (!ep.active) continue;
    const bool fresh = record_.overlaps[ep.interval].begin == time_;
    const auto& deep = deepest_[o];
    auto sample = [&](Pending& p) {
      if (contact_force_[o].norm() > p.force.norm()) {
        p.force = contact_force_[o];
        p.true_link = deep.link;
        p.true_point_link = robot_.frames()[deep.link].inverse() * deep.prox.point;
        p.proximity = deep.prox;
      }
    };
    if (fresh) {
      Pending p;
      p.due = detection_due(config_.torque_detection_period);
      p.onset = time_;
      p.obstacle = o;
      p.onset_segment = controller_.current_segment;
      p.interval = ep.interval;
      p.true_link = deep.link;
      p.proximity = deep.prox;
      sample(p);
      pending_.push_back(p);
    } else {
      for (auto& p : pending_) {
        if (p.obstacle == o && p.interval == ep.interval) sample(p);
      }
    }
  }
}

void World::process_detections(std::vector<SimEvent>& out) {
  struct Evaluated {
    ContactEvent event;
    PolicyDecision decision;
    std::size_t onset_segment;
  };
  std::vector<Evaluated> due;
  std::vector<Pending> keep;
  for (auto& p : pending_) {
    if (p.due > time_ + 1e-12) {
      keep.push_back(p);
      continue;
    }
    const Obstacle& ob = obstacles_[p.obstacle];
    ContactEvent ev;
    ev.time = time_;
    ev.contact_class = ob.contact_class;
    ev.obstacle = ob.name;
    if (p.pad) {
      const SkinPad& pad = model_->pad(*p.pad);
      auto now = pad_proximity(*model_, robot_.frames(), pad, ob, config_.contact_hysteresis * 2.0);
      const Proximity& prox = (now && now->penetration > 0.0) ? *now : p.proximity;
      ev.link = pad.link;
      ev.pad = pad.id;
      ev.point_world = prox.point;
      ev.point_link = pad_representative_point(*model_, pad);
      ev.normal = prox.normal;
    } else {
      if (p.force.norm() == 0.0) {
        if (episodes_[p.obstacle].active && episodes_[p.obstacle].interval == p.interval) {
          p.due = time_ + config_.dt;  // nothing measurable yet
          keep.push_back(p);
        } else {
          emit(SimEvent{time_, SimEventKind::diagnostic, {}, {}, controller_.current_segment,
                        "contact with " + ob.name + " produced no measurable joint torque"},
               out);
        }
        continue;
      }
      const ResidualVector r = synth_residual(*model_, robot_, p.force, p.true_link, p.true_point_link);
      const auto link = isolate_from_residual(r, config_.residual_epsilon);
      if (!link) {
        emit(SimEvent{time_, SimEventKind::diagnostic, {}, {}, controller_.current_segment,
                      "residual below isolation threshold for contact with " + ob.name},
             out);
        continue;
      }
      ev.link = *link;
      ev.point_world = robot_.frames()[p.true_link] * p.true_point_link;
      ev.point_link = link_representative_point(*model_, *link);
      ev.normal = p.force.normalized();
    }
    const PolicyDecision d = evaluate_contact(policy_, *model_, robot_, ev, config_.policy);

    ContactRecord row;
    row.time = time_;
    row.obstacle = ob.name;
    row.contact_class = ob.contact_class;
    row.link = ev.link;
    row.pad = ev.pad;
    row.speed = d.speed;
    row.estimated_force = d.estimated_force;
    row.m_R_used = d.m_R_used;
    row.mass_model = d.mass_model;
    row.reaction = d.reaction;
    auto& interval = record_.overlaps[p.interval];
    interval.detections += 1;
    if (ob.contact_class == ContactClass::quasi_static) {
      const bool closed = interval.end >= interval.begin;
      if (closed) {
        row.measured_force = interval.peak_force;
      } else {
        clamp_contact_rows_.push_back(record_.contacts.size());
      }
    }
    record_.contacts.push_back(row);
    emit(SimEvent{time_, SimEventKind::contact, ev, d, controller_.current_segment, {}}, out);
    due.push_back(Evaluated{ev, d, p.onset_segment});
  }
  pending_ = std::move(keep);
  if (due.empty()) return;

  // Simultaneous contacts: the largest estimated force decides.
  const Evaluated* winner = &due.front();
  for (const auto& e : due) {
    if (e.decision.estimated_force > winner->decision.estimated_force) winner = &e;
  }
  if (winner->decision.reaction != Reaction::STOP) return;

  record_.stop_count += 1;
  controller_.hold_until = time_ + config_.stop_hold;
  if (controller_.mode == ControlMode::tracking) controller_.mode = ControlMode::stopped;
  if (winner->event.contact_class == ContactClass::quasi_static &&
      winner->onset_segment == controller_.current_segment) {
    skip_after_hold_ = controller_.current_segment;
  }
  emit(SimEvent{time_, SimEventKind::stop, winner->event, winner->decision, controller_.current_segment, {}}, out);
}

std::vector<SimEvent> World::step(double dt) {
  std::vector<SimEvent> out;
  if (finished_) return out;
  const auto& script = scenario_->task_script;

  // Controller.
  if (controller_.mode == ControlMode::stopped) controller_.mode = ControlMode::holding;
  if (controller_.mode == ControlMode::holding && time_ + 1e-12 >= controller_.hold_until) {
    controller_.mode = ControlMode::tracking;
    emit(SimEvent{time_, SimEventKind::resume, {}, {}, controller_.current_segment, {}}, out);
    if (skip_after_hold_ && *skip_after_hold_ == controller_.current_segment) {
      skip_after_hold_.reset();
      const TaskSegment& seg = script[controller_.current_segment];
      nominal_start_ += seg.direction * controller_.segment_progress;
      emit(SimEvent{time_, SimEventKind::segment_end, {}, {}, controller_.current_segment, "aborted after stop"},
           out);
      if (controller_.current_segment + 1 >= script.size()) {
        finished_ = true;
        record_.success = true;
        record_.task_time = time_;
        emit(SimEvent{time_, SimEventKind::task_end, {}, {}, controller_.current_segment, {}}, out);
        return out;
      }
      start_segment(controller_.current_segment + 1, out);
    }
  }
  Eigen::VectorXd qdot = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model_->dof()));
  if (controller_.mode == ControlMode::tracking) qdot = controller_velocity(dt);

  // Kinematic arm.
  Eigen::VectorXd q = robot_.q() + dt * qdot;
  for (std::size_t i = 0; i < model_->dof(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    q[k] = std::clamp(q[k], model_->joints[i].position_min, model_->joints[i].position_max);
  }
  robot_.set_q(std::move(q));
  robot_.set_qdot(std::move(qdot));
  time_ += dt;

  // Obstacles.
  update_obstacles();
  bucket_physics(dt);
  clamp_physics();
  for (std::size_t b = 0; b < buckets_.size(); ++b) {
    if (std::abs(buckets_[b].theta) >= M_PI / 2) {
      fail("bucket " + obstacles_[b].name + " swung past horizontal", out);
      return out;
    }
  }
  track_episodes();

  // Sensing and reaction.
  if (model_->sensing_mode == SensingMode::skin_pads) {
    schedule_skin_detections();
  } else {
    schedule_torque_detections();
  }
  process_detections(out);

  if (config_.trajectory_sample_period > 0.0 && time_ + 1e-12 >= next_sample_) {
    record_.trajectory.push_back(robot_.q());
    next_sample_ += config_.trajectory_sample_period;
  }

  // Script progress.
  if (controller_.mode == ControlMode::tracking) {
    const TaskSegment& seg = script[controller_.current_segment];
    if (controller_.segment_progress >= seg.distance - 1e-12) {
      nominal_start_ += seg.direction * seg.distance;
      emit(SimEvent{time_, SimEventKind::segment_end, {}, {}, controller_.current_segment, {}}, out);
      if (controller_.current_segment + 1 >= script.size()) {
        finished_ = true;
        record_.success = true;
        record_.task_time = time_;
        emit(SimEvent{time_, SimEventKind::task_end, {}, {}, controller_.current_segment, {}}, out);
      } else {
        start_segment(controller_.current_segment + 1, out);
      }
    }
  }
  return out;
}

ExperimentRecord run_task(const RobotModel& model, const ScenarioConfig& scenario, PolicyKind policy,
                          const SimConfig& config) {
  World world(model, scenario, policy, config);
  std::vector<SimEvent> sink;
  while (!world.finished()) {
    if (world.time() >= config.timeout - 1e-12) {
      // Record the timeout through the same path as other failures.
      ExperimentRecord rec = world.take_record();
      rec.success = false;
      rec.failure = "timeout";
      rec.events.push_back(SimEvent{config.timeout, SimEventKind::diagnostic, {}, {}, {}, "timeout"});
      return rec;
    }
    world.step(config.dt);
  }
  ExperimentRecord rec = world.take_record();
  // Close clamp episodes still open at the end of the run.
  for (auto& c : rec.contacts) {
    if (c.contact_class == ContactClass::quasi_static && !c.measured_force) {
      double peak = 0.0;
      for (const auto& iv : rec.overlaps) {
        if (iv.obstacle == c.obstacle && iv.begin <= c.time) peak = iv.peak_force;
      }
      c.measured_force = peak;
    }
  }
  for (auto& iv : rec.overlaps) {
    if (iv.end < iv.begin) iv.end = world.time();
  }
  return rec;
}

void write_event_log(std::ostream& os, const std::vector<SimEvent>& events) {
  for (const auto& e : events) {
    nlohmann::json j;
    j["time"] = e.time;
    j["kind"] = to_string(e.kind);
    if (e.segment) j["segment"] = *e.segment;
    if (!e.message.empty()) j["message"] = e.message;
    if (e.contact) {
      const auto& c = *e.contact;
      j["contact"] = {{"link", c.link},
                      {"pad", c.pad ? nlohmann::json(*c.pad) : nlohmann::json(nullptr)},
                      {"obstacle", c.obstacle},
                      {"class", to_string(c.contact_class)},
                      {"point_world", vec_json(c.point_world)},
                      {"normal", vec_json(c.normal)}};
    }
    if (e.decision) {
      const auto& d = *e.decision;
      j["decision"] = {{"reaction", to_string(d.reaction)},
                       {"estimated_force", d.estimated_force},
                       {"m_R_used", d.m_R_used},
                       {"mass_model", to_string(d.mass_model)},
                       {"speed", d.speed}};
    }
    os << j.dump() << '\n';
  }
}

}  // namespace hrc
