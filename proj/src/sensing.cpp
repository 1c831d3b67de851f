#include "hrc/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hrc {

const char* to_string(ContactClass c) { return c == ContactClass::transient ? "transient" : "quasi_static"; }

Obstacle Obstacle::sphere(std::string name, const Eigen::Vector3d& center, double radius, ContactClass c) {
  Obstacle o;
  o.name = std::move(name);
  o.shape = Shape::sphere;
  o.contact_class = c;
  o.center = center;
  o.radius = radius;
  return o;
}

Obstacle Obstacle::make_box(std::string name, const geom::OrientedBox& box, ContactClass c) {
  Obstacle o;
  o.name = std::move(name);
  o.shape = Shape::box;
  o.contact_class = c;
  o.box = box;
  o.center = box.pose.translation();
  return o;
}

double Obstacle::bounding_radius() const { return shape == Shape::sphere ? radius : box.half_extents.norm(); }

Eigen::Vector3d Obstacle::bounding_center() const {
  return shape == Shape::sphere ? center : Eigen::Vector3d(box.pose.translation());
}

std::optional<Proximity> capsule_proximity(const Eigen::Vector3d& a, const Eigen::Vector3d& b, double radius,
                                           const Obstacle& obstacle, double cutoff) {
  const Eigen::Vector3d bc = obstacle.bounding_center();
  const double t_bound = geom::closest_segment_param(a, b, bc);
  const double d_bound = (a + t_bound * (b - a) - bc).norm();
  if (d_bound - radius - obstacle.bounding_radius() > cutoff) return std::nullopt;

  Proximity p;
  if (obstacle.shape == Obstacle::Shape::sphere) {
    const Eigen::Vector3d s = a + t_bound * (b - a);
    const Eigen::Vector3d diff = s - obstacle.center;
    const double d = diff.norm();
    p.normal = d > 1e-12 ? Eigen::Vector3d(diff / d) : Eigen::Vector3d::UnitZ();
    p.penetration = radius + obstacle.radius - d;
    p.point = s - radius * p.normal;
    return p;
  }

  const auto r = geom::closest_segment_box(a, b, obstacle.box);
  if (r.distance > 1e-12) {
    p.normal = (r.on_segment - r.on_box) / r.distance;
    p.penetration = radius - r.distance;
    p.point = r.on_segment - radius * p.normal;
    if (p.penetration < -cutoff) return std::nullopt;
    return p;
  }
  // Axis enters the box: depth of the axis point below the nearest face.
  const Eigen::Vector3d local = obstacle.box.pose.inverse() * r.on_segment;
  const Eigen::Vector3d depth = obstacle.box.half_extents - local.cwiseAbs();
  Eigen::Index axis = 0;
  depth.minCoeff(&axis);
  Eigen::Vector3d n_local = Eigen::Vector3d::Zero();
  n_local[axis] = local[axis] >= 0.0 ? 1.0 : -1.0;
  p.normal = obstacle.box.pose.linear() * n_local;
  p.penetration = radius + depth[axis];
  p.point = r.on_segment - radius * p.normal;
  return p;
}

std::optional<Proximity> pad_proximity(const RobotModel& model, const Frames& frames, const SkinPad& pad,
                                       const Obstacle& obstacle, double cutoff) {
  const Capsule& cap = model.links[pad.link].collision_geometry[pad.surface_patch.capsule];
  const auto& sp = pad.surface_patch;
  const Eigen::Isometry3d& T = frames[pad.link];
  const Eigen::Vector3d a = T * (cap.p0 + sp.t0 * (cap.p1 - cap.p0));
  const Eigen::Vector3d b = T * (cap.p0 + sp.t1 * (cap.p1 - cap.p0));
  auto prox = capsule_proximity(a, b, cap.radius, obstacle, cutoff);
  if (!prox || sp.full_circle()) return prox;

  const Eigen::Vector3d axis = cap.p1 - cap.p0;
  Eigen::Vector3d e1, e2;
  geom::perpendicular_basis(axis, e1, e2);
  const Eigen::Vector3d outward = T.linear().transpose() * (-prox->normal);
  const Eigen::Vector3d radial = outward - outward.dot(axis.normalized()) * axis.normalized();
  if (radial.norm() < 1e-6) return prox;  // straight off an end cap
  const double phi = std::atan2(radial.dot(e2), radial.dot(e1));
  // Sector bounds may extend past ±π; test the angle and its 2π aliases.
  for (double alias : {phi - 2.0 * M_PI, phi, phi + 2.0 * M_PI}) {
    if (alias >= sp.phi_min && alias <= sp.phi_max) return prox;
  }
  return std::nullopt;
}

Eigen::Vector3d pad_representative_point(const RobotModel& model, const SkinPad& pad) {
  const Capsule& cap = model.links.at(pad.link).collision_geometry.at(pad.surface_patch.capsule);
  const auto& sp = pad.surface_patch;
  const double t_mid = 0.5 * (sp.t0 + sp.t1);
  Eigen::Vector3d p = cap.p0 + t_mid * (cap.p1 - cap.p0);
  if (!sp.full_circle()) {
    Eigen::Vector3d e1, e2;
    geom::perpendicular_basis(cap.p1 - cap.p0, e1, e2);
    const double phi = 0.5 * (sp.phi_min + sp.phi_max);
    p += cap.radius * (std::cos(phi) * e1 + std::sin(phi) * e2);
  }
  return p;
}

Eigen::Vector3d link_representative_point(const RobotModel& model, std::size_t link) {
  const auto& geo = model.links.at(link).collision_geometry;
  if (geo.empty()) return Eigen::Vector3d::Zero();
  return 0.5 * (geo.front().p0 + geo.front().p1);
}

std::vector<ContactEvent> detect_skin(const RobotModel& model, const RobotState& state,
                                      const std::vector<Obstacle>& obstacles, double time) {
  std::vector<const SkinPad*> order;
  for (const auto& p : model.pads) order.push_back(&p);
  std::sort(order.begin(), order.end(), [](const SkinPad* x, const SkinPad* y) { return x->id < y->id; });

  std::vector<ContactEvent> events;
  for (const SkinPad* pad : order) {
    std::optional<Proximity> best;
    const Obstacle* best_obstacle = nullptr;
    for (const auto& ob : obstacles) {
      auto prox = pad_proximity(model, state.frames(), *pad, ob);
      if (prox && prox->penetration > 0.0 && (!best || prox->penetration > best->penetration)) {
        best = prox;
        best_obstacle = &ob;
      }
    }
    if (!best) continue;
    ContactEvent ev;
    ev.time = time;
    ev.link = pad->link;
    ev.pad = pad->id;
    ev.point_world = best->point;
    ev.point_link = pad_representative_point(model, *pad);
    ev.contact_class = best_obstacle->contact_class;
    ev.obstacle = best_obstacle->name;
    ev.normal = best->normal;
    events.push_back(std::move(ev));
  }
  return events;
}

ResidualVector synth_residual(const RobotModel& model, const RobotState& state, const Eigen::Vector3d& f_ext,
                              std::size_t link, const Eigen::Vector3d& point) {
  const Matrix3Xd J = point_jacobian(model, state.frames(), link, point);
  return ResidualVector{J.transpose() * f_ext};
}

std::optional<std::size_t> isolate_from_residual(const ResidualVector& residual, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("isolate_from_residual: epsilon must be positive");
  for (Eigen::Index j = residual.tau_ext.size(); j-- > 0;) {
    if (std::abs(residual.tau_ext[j]) > epsilon) return static_cast<std::size_t>(j);
  }
  return std::nullopt;
}

}  // namespace hrc
