#include "regrasp/shapes.hpp"

#include <cmath>
#include <map>
#include <numbers>

#include "regrasp/error.hpp"

namespace regrasp::shapes {

namespace {

using Vec2 = Eigen::Vector2d;

TriMesh centered(const TriMesh& mesh) {
  return mesh.transformed(Pose::from_translation(-mesh.bounds().center()));
}

void require_convex_ccw(const std::vector<Vec2>& profile) {
  if (profile.size() < 3) throw Error(ErrorCode::InvalidInput, "profile needs 3 or more corners");
  const std::size_t n = profile.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = profile[(i + 1) % n] - profile[i];
    const Vec2 b = profile[(i + 2) % n] - profile[(i + 1) % n];
    if (a.x() * b.y() - a.y() * b.x() <= 0.0) {
      throw Error(ErrorCode::InvalidInput, "profile must be convex and counter-clockwise");
    }
  }
}

// Rings of the same profile, capped at both ends. Ring k vertex i sits at
// index k * n + i.
TriMesh sweep(const std::vector<std::vector<Vec3>>& rings) {
  const int n = static_cast<int>(rings.front().size());
  std::vector<Vec3> vertices;
  for (const auto& ring : rings) vertices.insert(vertices.end(), ring.begin(), ring.end());
  std::vector<Face> faces;
  const int last = static_cast<int>(rings.size()) - 1;
  for (int i = 1; i + 1 < n; ++i) {
    faces.push_back({0, i + 1, i});
    faces.push_back({last * n, last * n + i, last * n + i + 1});
  }
  for (int k = 0; k < last; ++k) {
    for (int i = 0; i < n; ++i) {
      const int j = (i + 1) % n;
      const int a = k * n + i, b = k * n + j, c = (k + 1) * n + j, d = (k + 1) * n + i;
      faces.push_back({a, b, c});
      faces.push_back({a, c, d});
    }
  }
  return TriMesh(std::move(vertices), std::move(faces)).oriented_outward();
}

}  // namespace

TriMesh box(double sx, double sy, double sz) {
  if (!(sx > 0 && sy > 0 && sz > 0)) throw Error(ErrorCode::InvalidInput, "box sizes must be positive");
  const Vec3 h(sx / 2, sy / 2, sz / 2);
  std::vector<Vec3> v;
  for (int i = 0; i < 8; ++i) {
    v.emplace_back((i & 1) ? h.x() : -h.x(), (i & 2) ? h.y() : -h.y(), (i & 4) ? h.z() : -h.z());
  }
  std::vector<Face> f{{0, 2, 1}, {1, 2, 3}, {4, 5, 6}, {5, 7, 6}, {0, 1, 4}, {1, 5, 4},
                      {2, 6, 3}, {3, 6, 7}, {0, 4, 2}, {2, 4, 6}, {1, 3, 5}, {3, 7, 5}};
  return TriMesh(std::move(v), std::move(f)).oriented_outward();
}

std::vector<Vec2> rhombus_profile(double thickness, double acute_deg) {
  if (!(thickness > 0.0) || !(acute_deg > 0.0 && acute_deg <= 90.0)) {
    throw Error(ErrorCode::InvalidInput, "bad rhombus parameters");
  }
  const double a = acute_deg * std::numbers::pi / 180.0;
  const double side = thickness / std::sin(a);
  const double run = side * std::cos(a);
  return {{0.0, 0.0}, {side, 0.0}, {side + run, thickness}, {run, thickness}};
}

std::vector<Vec2> square_profile(double side) {
  return {{0.0, 0.0}, {side, 0.0}, {side, side}, {0.0, side}};
}

TriMesh prism(const std::vector<Vec2>& profile, double length) {
  require_convex_ccw(profile);
  if (!(length > 0.0)) throw Error(ErrorCode::InvalidInput, "prism length must be positive");
  std::vector<std::vector<Vec3>> rings(2);
  for (const Vec2& q : profile) {
    rings[0].emplace_back(0.0, q.x(), q.y());
    rings[1].emplace_back(length, q.x(), q.y());
  }
  return centered(sweep(rings));
}

TriMesh l_shape(const std::vector<Vec2>& profile, double long_arm, double short_arm) {
  require_convex_ccw(profile);
  double u_min = profile.front().x();
  double u_max = u_min;
  for (const Vec2& q : profile) {
    u_min = std::min(u_min, q.x());
    u_max = std::max(u_max, q.x());
  }
  if (!(long_arm > u_max - u_min) || !(short_arm > u_max - u_min)) {
    throw Error(ErrorCode::InvalidInput, "arms must be longer than the profile is wide");
  }
  // Long arm along +x, short arm along +y; the profile's u runs across each
  // arm and the two meet on the miter plane x = y.
  std::vector<std::vector<Vec3>> rings(3);
  for (const Vec2& q : profile) {
    const double u = q.x() - u_min;
    rings[0].emplace_back(long_arm, u, q.y());
    rings[1].emplace_back(u, u, q.y());
    rings[2].emplace_back(u, short_arm, q.y());
  }
  return centered(sweep(rings));
}

TriMesh l_square() { return l_shape(square_profile(0.025), 0.125, 0.100); }

TriMesh l_diamond() { return l_shape(rhombus_profile(0.025, 75.0), 0.125, 0.100); }

TriMesh diamond_prism(double length) { return prism(rhombus_profile(0.025, 75.0), length); }

TriMesh icosphere(double radius, int subdivisions) {
  if (!(radius > 0.0) || subdivisions < 0) throw Error(ErrorCode::InvalidInput, "bad sphere");
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v{{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                      {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (Vec3& x : v) x.normalize();
  std::vector<Face> f{{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto [it, inserted] = mid.try_emplace({key.first, key.second}, static_cast<int>(v.size()));
      if (inserted) v.push_back((v[static_cast<std::size_t>(a)] + v[static_cast<std::size_t>(b)]).normalized());
      return it->second;
    };
    std::vector<Face> next;
    next.reserve(f.size() * 4);
    for (const Face& tri : f) {
      const int ab = midpoint(tri[0], tri[1]);
      const int bc = midpoint(tri[1], tri[2]);
      const int ca = midpoint(tri[2], tri[0]);
      next.push_back({tri[0], ab, ca});
      next.push_back({tri[1], bc, ab});
      next.push_back({tri[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    f = std::move(next);
  }
  for (Vec3& x : v) x *= radius;
  return TriMesh(std::move(v), std::move(f)).oriented_outward();
}

std::vector<std::string> builtin_names() {
  return {"l-square", "l-diamond", "diamond-prism", "cube25", "sphere40"};
}

TriMesh builtin(const std::string& name) {
  if (name == "l-square") return l_square();
  if (name == "l-diamond") return l_diamond();
  if (name == "diamond-prism") return diamond_prism();
  if (name == "cube25") return cube(0.025);
  if (name == "sphere40") return icosphere(0.020, 3);
  throw Error(ErrorCode::InvalidInput, "unknown builtin shape: " + name);
}

}  // namespace regrasp::shapes
