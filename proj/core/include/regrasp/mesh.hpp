#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "regrasp/geometry.hpp"

namespace regrasp {

using Face = std::array<int, 3>;

struct RayHit {
  Vec3 point;
  Vec3 normal;  // outward unit normal of the hit face
  double distance = 0.0;
  int face = -1;
};

class Bvh;

// Immutable triangle mesh with per-face outward normals and a bounding
// volume hierarchy built at construction. Units are meters.
class TriMesh {
 public:
  TriMesh();
  // Throws InvalidInput on out-of-range indices or degenerate faces.
  TriMesh(std::vector<Vec3> vertices, std::vector<Face> faces);
  ~TriMesh();
  TriMesh(const TriMesh&);
  TriMesh& operator=(const TriMesh&);
  TriMesh(TriMesh&&) noexcept;
  TriMesh& operator=(TriMesh&&) noexcept;

  std::span<const Vec3> vertices() const { return vertices_; }
  std::span<const Face> faces() const { return faces_; }
  std::span<const Vec3> normals() const { return normals_; }
  std::span<const double> areas() const { return areas_; }

  std::size_t num_faces() const { return faces_.size(); }
  Vec3 vertex(int i) const { return vertices_[static_cast<std::size_t>(i)]; }
  const Vec3& normal(std::size_t f) const { return normals_[f]; }
  std::array<Vec3, 3> triangle(std::size_t f) const;

  const Aabb& bounds() const { return bounds_; }
  double surface_area() const { return total_area_; }
  double signed_volume() const;
  double max_edge_length() const;

  // Every undirected edge is shared by exactly two faces, traversed once in
  // each direction.
  bool is_watertight() const;

  // Copy with faces re-wound so that neighbors agree and the enclosed volume
  // is positive. Requires a closed manifold.
  TriMesh oriented_outward() const;
  TriMesh transformed(const Pose& pose) const;
  TriMesh scaled(double factor) const;

  const Bvh& bvh() const { return *bvh_; }

 private:
  std::vector<Vec3> vertices_;
  std::vector<Face> faces_;
  std::vector<Vec3> normals_;
  std::vector<double> areas_;
  double total_area_ = 0.0;
  Aabb bounds_;
  std::shared_ptr<const Bvh> bvh_;
};

// Binary AABB tree over triangle indices, median split on the longest axis.
class Bvh {
 public:
  struct Node {
    Aabb box;
    std::int32_t left = -1;   // child index, or -1 for leaves
    std::int32_t right = -1;
    std::int32_t first = 0;   // leaf range into order_
    std::int32_t count = 0;
  };

  explicit Bvh(const TriMesh& mesh);

  // Nearest accepted hit with distance in (min_distance, max_distance].
  std::optional<RayHit> intersect(
      const TriMesh& mesh, const Ray& ray, double min_distance, double max_distance,
      const std::function<bool(const RayHit&)>& accept = {}) const;

  // Calls visit(face) for every face whose box overlaps `box`; stops early
  // when visit returns true. Returns whether any visit returned true.
  bool any_overlapping(const Aabb& box, const std::function<bool(int)>& visit) const;

  std::span<const Node> nodes() const { return nodes_; }

 private:
  std::int32_t build(const TriMesh& mesh, std::vector<Aabb>& boxes, std::vector<Vec3>& centers,
                     std::int32_t first, std::int32_t count);

  std::vector<Node> nodes_;
  std::vector<std::int32_t> order_;
};

inline constexpr double kRaySelfHitGuard = 1e-6;

// Moller-Trumbore ray/triangle test. Returns the hit distance along the ray.
std::optional<double> ray_triangle_intersect(const Ray& ray, const Vec3& a, const Vec3& b,
                                             const Vec3& c);

// Nearest intersection farther than min_distance (default guards against the
// face the ray starts on).
std::optional<RayHit> ray_mesh_intersect(const Ray& ray, const TriMesh& mesh,
                                         double min_distance = kRaySelfHitGuard);

// Nearest intersection where the ray leaves the solid (face normal along the
// ray direction).
std::optional<RayHit> ray_mesh_exit(const Ray& ray, const TriMesh& mesh,
                                    double min_distance = 0.0);

// Mesh file loading. Coordinates are multiplied by `scale` (default reads
// millimeter-authored files into meters). Coincident STL corners are welded.
TriMesh load_stl(const std::string& path, double scale = 0.001);
TriMesh load_obj(const std::string& path, double scale = 0.001);
// Dispatches on extension (.stl / .obj), or a "builtin:<name>" shape.
TriMesh load_mesh(const std::string& path, double scale = 0.001);

// ASCII STL writer; coordinates are divided by `scale` so that
// load_stl(path, scale) reproduces the mesh.
void save_stl(const TriMesh& mesh, const std::string& path, double scale = 0.001);
void save_obj(const TriMesh& mesh, const std::string& path, double scale = 0.001);

}  // namespace regrasp
