#include "regrasp/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>

#include "regrasp/error.hpp"

namespace regrasp {

namespace {

constexpr int kLeafSize = 4;

Aabb triangle_box(const TriMesh& mesh, std::size_t f) {
  Aabb box;
  for (const Vec3& v : mesh.triangle(f)) box.extend(v);
  return box;
}

}  // namespace

TriMesh::TriMesh() : bvh_(std::make_shared<Bvh>(*this)) {}

TriMesh::TriMesh(std::vector<Vec3> vertices, std::vector<Face> faces)
    : vertices_(std::move(vertices)), faces_(std::move(faces)) {
  const int nv = static_cast<int>(vertices_.size());
  normals_.reserve(faces_.size());
  areas_.reserve(faces_.size());
  for (const Vec3& v : vertices_) {
    if (!v.allFinite()) throw Error(ErrorCode::InvalidInput, "non-finite vertex");
  }
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    for (int idx : faces_[f]) {
      if (idx < 0 || idx >= nv) {
        throw Error(ErrorCode::InvalidInput, "face " + std::to_string(f) + " has a bad vertex index");
      }
    }
    const auto [a, b, c] = triangle(f);
    const Vec3 n = (b - a).cross(c - a);
    const double len = n.norm();
    if (!(len > 0.0)) {
      throw Error(ErrorCode::InvalidInput, "face " + std::to_string(f) + " is degenerate");
    }
    normals_.push_back(n / len);
    areas_.push_back(0.5 * len);
    total_area_ += 0.5 * len;
  }
  for (const Vec3& v : vertices_) bounds_.extend(v);
  bvh_ = std::make_shared<Bvh>(*this);
}

TriMesh::~TriMesh() = default;
TriMesh::TriMesh(const TriMesh&) = default;
TriMesh& TriMesh::operator=(const TriMesh&) = default;
TriMesh::TriMesh(TriMesh&&) noexcept = default;
TriMesh& TriMesh::operator=(TriMesh&&) noexcept = default;

std::array<Vec3, 3> TriMesh::triangle(std::size_t f) const {
  const Face& t = faces_[f];
  return {vertices_[static_cast<std::size_t>(t[0])], vertices_[static_cast<std::size_t>(t[1])],
          vertices_[static_cast<std::size_t>(t[2])]};
}

double TriMesh::signed_volume() const {
  double v = 0.0;
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    const auto [a, b, c] = triangle(f);
    v += a.dot(b.cross(c));
  }
  return v / 6.0;
}

double TriMesh::max_edge_length() const {
  double m = 0.0;
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    const auto t = triangle(f);
    for (int i = 0; i < 3; ++i) m = std::max(m, (t[i] - t[(i + 1) % 3]).norm());
  }
  return m;
}

bool TriMesh::is_watertight() const {
  if (faces_.empty()) return false;
  std::map<std::pair<int, int>, int> directed;
  for (const Face& t : faces_) {
    for (int i = 0; i < 3; ++i) {
      if (++directed[{t[i], t[(i + 1) % 3]}] > 1) return false;
    }
  }
  for (const auto& [edge, count] : directed) {
    if (!directed.contains({edge.second, edge.first})) return false;
  }
  return true;
}

TriMesh TriMesh::oriented_outward() const {
  const std::size_t nf = faces_.size();
  std::map<std::pair<int, int>, std::vector<std::size_t>> edge_faces;
  for (std::size_t f = 0; f < nf; ++f) {
    for (int i = 0; i < 3; ++i) {
      const int a = faces_[f][i];
      const int b = faces_[f][(i + 1) % 3];
      edge_faces[{std::min(a, b), std::max(a, b)}].push_back(f);
    }
  }
  for (const auto& [edge, fs] : edge_faces) {
    if (fs.size() != 2) throw Error(ErrorCode::InvalidInput, "mesh is not a closed manifold");
  }

  auto has_directed = [](const Face& t, int a, int b) {
    for (int i = 0; i < 3; ++i) {
      if (t[i] == a && t[(i + 1) % 3] == b) return true;
    }
    return false;
  };

  std::vector<Face> out = faces_;
  std::vector<bool> seen(nf, false);
  for (std::size_t seed = 0; seed < nf; ++seed) {
    if (seen[seed]) continue;
    // Flood one connected component, flipping neighbors to agree with the
    // face they were reached from.
    std::vector<std::size_t> component;
    std::queue<std::size_t> queue;
    queue.push(seed);
    seen[seed] = true;
    while (!queue.empty()) {
      const std::size_t f = queue.front();
      queue.pop();
      component.push_back(f);
      for (int i = 0; i < 3; ++i) {
        const int a = out[f][i];
        const int b = out[f][(i + 1) % 3];
        for (std::size_t g : edge_faces[{std::min(a, b), std::max(a, b)}]) {
          if (g == f || seen[g]) continue;
          if (has_directed(out[g], a, b)) std::swap(out[g][1], out[g][2]);
          seen[g] = true;
          queue.push(g);
        }
      }
    }
    double vol = 0.0;
    for (std::size_t f : component) {
      const Vec3& a = vertices_[static_cast<std::size_t>(out[f][0])];
      const Vec3& b = vertices_[static_cast<std::size_t>(out[f][1])];
      const Vec3& c = vertices_[static_cast<std::size_t>(out[f][2])];
      vol += a.dot(b.cross(c));
    }
    if (vol < 0.0) {
      for (std::size_t f : component) std::swap(out[f][1], out[f][2]);
    }
  }
  return {vertices_, std::move(out)};
}

TriMesh TriMesh::transformed(const Pose& pose) const {
  std::vector<Vec3> v;
  v.reserve(vertices_.size());
  for (const Vec3& x : vertices_) v.push_back(pose.transform_point(x));
  return {std::move(v), faces_};
}

TriMesh TriMesh::scaled(double factor) const {
  if (!(factor > 0.0)) throw Error(ErrorCode::InvalidInput, "scale must be positive");
  std::vector<Vec3> v;
  v.reserve(vertices_.size());
  for (const Vec3& x : vertices_) v.push_back(factor * x);
  return {std::move(v), faces_};
}

Bvh::Bvh(const TriMesh& mesh) {
  const auto n = static_cast<std::int32_t>(mesh.num_faces());
  order_.resize(static_cast<std::size_t>(n));
  std::iota(order_.begin(), order_.end(), 0);
  if (n == 0) return;
  std::vector<Aabb> boxes;
  std::vector<Vec3> centers;
  boxes.reserve(order_.size());
  centers.reserve(order_.size());
  for (std::size_t f = 0; f < order_.size(); ++f) {
    boxes.push_back(triangle_box(mesh, f));
    centers.push_back(boxes.back().center());
  }
  nodes_.reserve(2 * order_.size() / kLeafSize + 1);
  build(mesh, boxes, centers, 0, n);
}

std::int32_t Bvh::build(const TriMesh& mesh, std::vector<Aabb>& boxes, std::vector<Vec3>& centers,
                        std::int32_t first, std::int32_t count) {
  const auto index = static_cast<std::int32_t>(nodes_.size());
  nodes_.emplace_back();
  Aabb box;
  Aabb center_box;
  for (std::int32_t i = first; i < first + count; ++i) {
    box.extend(boxes[static_cast<std::size_t>(order_[static_cast<std::size_t>(i)])]);
    center_box.extend(centers[static_cast<std::size_t>(order_[static_cast<std::size_t>(i)])]);
  }
  nodes_[static_cast<std::size_t>(index)].box = box;
  if (count <= kLeafSize) {
    nodes_[static_cast<std::size_t>(index)].first = first;
    nodes_[static_cast<std::size_t>(index)].count = count;
    return index;
  }
  int axis = 0;
  center_box.extent().maxCoeff(&axis);
  const std::int32_t half = count / 2;
  auto begin = order_.begin() + first;
  // Stable ordering on ties keeps the tree identical across runs.
  std::nth_element(begin, begin + half, begin + count, [&](std::int32_t a, std::int32_t b) {
    const double ca = centers[static_cast<std::size_t>(a)][axis];
    const double cb = centers[static_cast<std::size_t>(b)][axis];
    return ca < cb || (ca == cb && a < b);
  });
  const std::int32_t left = build(mesh, boxes, centers, first, half);
  const std::int32_t right = build(mesh, boxes, centers, first + half, count - half);
  nodes_[static_cast<std::size_t>(index)].left = left;
  nodes_[static_cast<std::size_t>(index)].right = right;
  return index;
}

std::optional<RayHit> Bvh::intersect(const TriMesh& mesh, const Ray& ray, double min_distance,
                                     double max_distance,
                                     const std::function<bool(const RayHit&)>& accept) const {
  std::optional<RayHit> best;
  if (nodes_.empty()) return best;
  double limit = max_distance;
  std::vector<std::int32_t> stack{0};
  while (!stack.empty()) {
    const Node& node = nodes_[static_cast<std::size_t>(stack.back())];
    stack.pop_back();
    if (!node.box.intersects(ray, min_distance, limit)) continue;
    if (node.left < 0) {
      for (std::int32_t i = node.first; i < node.first + node.count; ++i) {
        const auto f = static_cast<std::size_t>(order_[static_cast<std::size_t>(i)]);
        const auto [a, b, c] = mesh.triangle(f);
        const auto t = ray_triangle_intersect(ray, a, b, c);
        if (!t || *t <= min_distance || *t > limit) continue;
        // Equal distances (shared edges) resolve to the lower face index.
        if (best && *t == limit && static_cast<int>(f) > best->face) continue;
        RayHit hit{ray.at(*t), mesh.normal(f), *t, static_cast<int>(f)};
        if (accept && !accept(hit)) continue;
        best = hit;
        limit = *t;
      }
    } else {
      stack.push_back(node.right);
      stack.push_back(node.left);
    }
  }
  return best;
}

bool Bvh::any_overlapping(const Aabb& box, const std::function<bool(int)>& visit) const {
  if (nodes_.empty()) return false;
  std::vector<std::int32_t> stack{0};
  while (!stack.empty()) {
    const Node& node = nodes_[static_cast<std::size_t>(stack.back())];
    stack.pop_back();
    if (!node.box.overlaps(box)) continue;
    if (node.left < 0) {
      for (std::int32_t i = node.first; i < node.first + node.count; ++i) {
        if (visit(order_[static_cast<std::size_t>(i)])) return true;
      }
    } else {
      stack.push_back(node.right);
      stack.push_back(node.left);
    }
  }
  return false;
}

std::optional<double> ray_triangle_intersect(const Ray& ray, const Vec3& a, const Vec3& b,
                                             const Vec3& c) {
  // Small barycentric slack so rays through shared edges are not lost.
  constexpr double kBaryTol = 1e-12;
  const Vec3 e1 = b - a;
  const Vec3 e2 = c - a;
  const Vec3 p = ray.direction.cross(e2);
  const double det = e1.dot(p);
  const double scale = e1.norm() * e2.norm();
  if (std::abs(det) <= 1e-14 * scale) return std::nullopt;
  const double inv = 1.0 / det;
  const Vec3 s = ray.origin - a;
  const double u = s.dot(p) * inv;
  if (u < -kBaryTol || u > 1.0 + kBaryTol) return std::nullopt;
  const Vec3 q = s.cross(e1);
  const double v = ray.direction.dot(q) * inv;
  if (v < -kBaryTol || u + v > 1.0 + kBaryTol) return std::nullopt;
  return e2.dot(q) * inv;
}

std::optional<RayHit> ray_mesh_intersect(const Ray& ray, const TriMesh& mesh,
                                         double min_distance) {
  return mesh.bvh().intersect(mesh, ray, min_distance, std::numeric_limits<double>::infinity());
}

std::optional<RayHit> ray_mesh_exit(const Ray& ray, const TriMesh& mesh, double min_distance) {
  return mesh.bvh().intersect(mesh, ray, min_distance, std::numeric_limits<double>::infinity(),
                              [&](const RayHit& h) { return h.normal.dot(ray.direction) > 0.0; });
}

}  // namespace regrasp
