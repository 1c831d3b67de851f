// Closest-point queries between capsules, spheres and oriented boxes.
#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace hrc::geom {

/// Parameter t in [0,1] of the point on segment a-b closest to p.
double closest_segment_param(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& p);

struct OrientedBox {
  Eigen::Isometry3d pose = Eigen::Isometry3d::Identity();  // box centre and axes
  Eigen::Vector3d half_extents = Eigen::Vector3d::Constant(0.05);

  Eigen::Vector3d closest_point(const Eigen::Vector3d& p) const;
  double distance(const Eigen::Vector3d& p) const { return (closest_point(p) - p).norm(); }
};

struct SegmentBoxResult {
  double t = 0.0;               // segment parameter of the closest point
  Eigen::Vector3d on_segment;   // closest point on the segment
  Eigen::Vector3d on_box;       // closest point on (or in) the box
  double distance = 0.0;        // 0 when the segment enters the box
};

/// Distance along a segment to a box is convex in t, so a bracketing search
/// converges to the global minimum.
SegmentBoxResult closest_segment_box(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const OrientedBox& box);

/// Orthonormal (e1, e2) perpendicular to `axis`, fixed relative to the frame
/// the axis is expressed in. Angles around a capsule are atan2(w·e2, w·e1).
void perpendicular_basis(const Eigen::Vector3d& axis, Eigen::Vector3d& e1, Eigen::Vector3d& e2);

/// Box whose face at `face_center` has outward normal `normal`; the box
/// extends half_extents.z() * 2 behind the face.
OrientedBox box_behind_face(const Eigen::Vector3d& face_center, const Eigen::Vector3d& normal,
                            const Eigen::Vector3d& half_extents);

}  // namespace hrc::geom
