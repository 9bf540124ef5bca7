#pragma once

#include <array>
#include <span>

#include "regrasp/geometry.hpp"
#include "regrasp/mesh.hpp"

namespace regrasp {

// Box with center/orientation `frame` and half extents along its local axes.
struct OrientedBox {
  Pose frame;
  Vec3 half_extents = Vec3::Zero();

  OrientedBox transformed(const Pose& pose) const { return {compose(pose, frame), half_extents}; }
  std::array<Vec3, 8> corners() const;
  Aabb bounds() const;
};

// Separating-axis tests. Shapes that only touch are separated; a positive
// `slack` also ignores penetration shallower than slack.
bool box_intersects_triangle(const OrientedBox& box, const Vec3& a, const Vec3& b, const Vec3& c,
                             double slack = 0.0);
bool box_intersects_box(const OrientedBox& a, const OrientedBox& b, double slack = 0.0);
bool box_intersects_mesh(const OrientedBox& box, const TriMesh& mesh, const Pose& mesh_pose,
                         double slack = 0.0);

bool any_box_intersects(std::span<const OrientedBox> a, std::span<const OrientedBox> b,
                        double slack = 0.0);

}  // namespace regrasp
