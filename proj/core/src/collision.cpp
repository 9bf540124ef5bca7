#include "regrasp/collision.hpp"

#include <algorithm>
#include <cmath>

namespace regrasp {

std::array<Vec3, 8> OrientedBox::corners() const {
  std::array<Vec3, 8> c;
  for (int i = 0; i < 8; ++i) {
    const Vec3 s((i & 1) ? 1.0 : -1.0, (i & 2) ? 1.0 : -1.0, (i & 4) ? 1.0 : -1.0);
    c[static_cast<std::size_t>(i)] = frame.transform_point(s.cwiseProduct(half_extents));
  }
  return c;
}

Aabb OrientedBox::bounds() const {
  const Vec3 r = frame.R.cwiseAbs() * half_extents;
  return {frame.p - r, frame.p + r};
}

namespace {

// Tiny cross products come from near-parallel edges; their direction is
// noise and the face axes already cover the case.
constexpr double kAxisEps = 1e-12;

bool separated_on(const Vec3& axis, const OrientedBox& box, const Vec3* pts, int n, double slack) {
  const double len = axis.norm();
  if (len < kAxisEps) return false;
  const Vec3 l = axis / len;
  const double r = box.half_extents.x() * std::abs(l.dot(box.frame.R.col(0))) +
                   box.half_extents.y() * std::abs(l.dot(box.frame.R.col(1))) +
                   box.half_extents.z() * std::abs(l.dot(box.frame.R.col(2)));
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int i = 0; i < n; ++i) {
    const double t = l.dot(pts[i] - box.frame.p);
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  return lo >= r - slack || hi <= -r + slack;
}

}  // namespace

bool box_intersects_triangle(const OrientedBox& box, const Vec3& a, const Vec3& b, const Vec3& c,
                             double slack) {
  const Vec3 pts[3] = {a, b, c};
  const Vec3 edges[3] = {b - a, c - b, a - c};
  for (int i = 0; i < 3; ++i) {
    if (separated_on(box.frame.R.col(i), box, pts, 3, slack)) return false;
  }
  if (separated_on(edges[0].cross(edges[1]), box, pts, 3, slack)) return false;
  for (int i = 0; i < 3; ++i) {
    for (const Vec3& e : edges) {
      if (separated_on(box.frame.R.col(i).cross(e), box, pts, 3, slack)) return false;
    }
  }
  return true;
}

bool box_intersects_box(const OrientedBox& a, const OrientedBox& b, double slack) {
  const auto cb = b.corners();
  // Corners of b against a; b's extent along each axis enters through them.
  std::vector<Vec3> axes;
  for (int i = 0; i < 3; ++i) axes.push_back(a.frame.R.col(i));
  for (int i = 0; i < 3; ++i) axes.push_back(b.frame.R.col(i));
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) axes.push_back(a.frame.R.col(i).cross(b.frame.R.col(j)));
  }
  for (const Vec3& axis : axes) {
    if (separated_on(axis, a, cb.data(), 8, slack)) return false;
  }
  return true;
}

bool box_intersects_mesh(const OrientedBox& box, const TriMesh& mesh, const Pose& mesh_pose,
                         double slack) {
  const OrientedBox local = box.transformed(invert(mesh_pose));
  return mesh.bvh().any_overlapping(local.bounds(), [&](int f) {
    const auto [p, q, r] = mesh.triangle(static_cast<std::size_t>(f));
    return box_intersects_triangle(local, p, q, r, slack);
  });
}

bool any_box_intersects(std::span<const OrientedBox> a, std::span<const OrientedBox> b,
                        double slack) {
  for (const OrientedBox& x : a) {
    for (const OrientedBox& y : b) {
      if (x.bounds().overlaps(y.bounds()) && box_intersects_box(x, y, slack)) return true;
    }
  }
  return false;
}

}  // namespace regrasp
