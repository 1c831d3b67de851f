#include "hrc/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace hrc::geom {

double closest_segment_param(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& p) {
  const Eigen::Vector3d ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 < 1e-18) return 0.0;
  return std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
}

Eigen::Vector3d OrientedBox::closest_point(const Eigen::Vector3d& p) const {
  const Eigen::Vector3d local = pose.inverse() * p;
  const Eigen::Vector3d clamped = local.cwiseMax(-half_extents).cwiseMin(half_extents);
  return pose * clamped;
}

SegmentBoxResult closest_segment_box(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const OrientedBox& box) {
  auto dist_at = [&](double t) { return box.distance(a + t * (b - a)); };
  double lo = 0.0;
  double hi = 1.0;
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = dist_at(x1);
  double f2 = dist_at(x2);
  for (int it = 0; it < 60 && hi - lo > 1e-10; ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = dist_at(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = dist_at(x2);
    }
  }
  double t = 0.5 * (lo + hi);
  // The interval search can miss a minimum sitting exactly on an endpoint.
  for (double cand : {0.0, 1.0}) {
    if (dist_at(cand) < dist_at(t)) t = cand;
  }
  SegmentBoxResult r;
  r.t = t;
  r.on_segment = a + t * (b - a);
  r.on_box = box.closest_point(r.on_segment);
  r.distance = (r.on_box - r.on_segment).norm();
  return r;
}

void perpendicular_basis(const Eigen::Vector3d& axis, Eigen::Vector3d& e1, Eigen::Vector3d& e2) {
  const Eigen::Vector3d a = axis.normalized();
  Eigen::Vector3d ref = Eigen::Vector3d::UnitX();
  if (std::abs(a.dot(ref)) > 0.9) ref = Eigen::Vector3d::UnitY();
  e1 = (ref - ref.dot(a) * a).normalized();
  e2 = a.cross(e1);
}

OrientedBox box_behind_face(const Eigen::Vector3d& face_center, const Eigen::Vector3d& normal,
                            const Eigen::Vector3d& half_extents) {
  Eigen::Vector3d e1, e2;
  perpendicular_basis(normal, e1, e2);
  OrientedBox box;
  box.pose = Eigen::Isometry3d::Identity();
  box.pose.linear().col(0) = e1;
  box.pose.linear().col(1) = e2;
  box.pose.linear().col(2) = normal.normalized();
  box.pose.translation() = face_center - normal.normalized() * half_extents.z();
  box.half_extents = half_extents;
  return box;
}

}  // namespace hrc::geom
