#include "regrasp/grasp_planner.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "regrasp/error.hpp"
#include "regrasp/random.hpp"

namespace regrasp {

GraspCandidate GraspCandidate::from_pose(const Pose& pose, double width, int pair_index) {
  return {pose, width, pose.R.col(1), pair_index};
}

std::vector<ContactPair> sample_antipodal_pairs(const TriMesh& mesh, int n_points,
                                                double antipodal_tol, const GripperModel& gripper,
                                                std::uint64_t rng_seed) {
  if (n_points < 1) throw Error(ErrorCode::InvalidInput, "n_points must be at least 1");
  if (!(antipodal_tol > 0.0 && antipodal_tol < 1.0)) {
    throw Error(ErrorCode::InvalidInput, "antipodal_tol must lie in (0, 1)");
  }
  if (mesh.num_faces() == 0) throw Error(ErrorCode::InvalidInput, "empty mesh");

  std::vector<double> cumulative(mesh.num_faces());
  double acc = 0.0;
  for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
    acc += mesh.areas()[f];
    cumulative[f] = acc;
  }

  std::vector<ContactPair> pairs;
  for (int i = 0; i < n_points; ++i) {
    Rng rng(derive_seed(rng_seed, static_cast<std::uint64_t>(i)));
    const double pick = rng.uniform() * acc;
    const auto face = static_cast<std::size_t>(
        std::min<std::ptrdiff_t>(std::upper_bound(cumulative.begin(), cumulative.end(), pick) -
                                     cumulative.begin(),
                                 static_cast<std::ptrdiff_t>(mesh.num_faces()) - 1));
    const double r1 = std::sqrt(rng.uniform());
    const double r2 = rng.uniform();
    const auto [a, b, c] = mesh.triangle(face);
    const Vec3 p = (1.0 - r1) * a + r1 * (1.0 - r2) * b + r1 * r2 * c;
    const Vec3& n = mesh.normal(face);

    const auto hit = ray_mesh_intersect(Ray(p, -n), mesh);
    if (!hit) continue;
    if (!(n.dot(hit->normal) < -(1.0 - antipodal_tol))) continue;
    const double width = (hit->point - p).norm();
    if (!(width > 0.0) || width > gripper.max_opening) continue;
    pairs.push_back({p, hit->point, n, hit->normal, width, static_cast<int>(face), hit->face, i});
  }
  if (pairs.empty()) {
    throw Error(ErrorCode::NoPairsFound,
                "no antipodal pair fits the gripper among " + std::to_string(n_points) + " samples");
  }
  return pairs;
}

Pose grasp_frame_for_pair(const ContactPair& pair, double angle) {
  const Vec3 y = (pair.point_b - pair.point_a).normalized();
  const Vec3 base = any_orthogonal(y);
  const Vec3 z = std::cos(angle) * base + std::sin(angle) * y.cross(base);
  Mat3 R;
  R.col(0) = y.cross(z);
  R.col(1) = y;
  R.col(2) = z;
  return {R, 0.5 * (pair.point_a + pair.point_b)};
}

bool check_gripper_collision(const Pose& pose, double width, const GripperModel& gripper,
                             const TriMesh& mesh) {
  for (const OrientedBox& box : gripper_boxes_world(gripper, pose, width, kPadClearance)) {
    if (box_intersects_mesh(box, mesh, Pose::identity())) return true;
  }
  return false;
}

std::vector<GraspCandidate> expand_pair_to_grasps(const ContactPair& pair, const TriMesh& mesh,
                                                  const GripperModel& gripper, int n_rotations) {
  if (n_rotations < 1) throw Error(ErrorCode::InvalidInput, "n_rotations must be at least 1");
  std::vector<GraspCandidate> out;
  for (int k = 0; k < n_rotations; ++k) {
    const double angle = 2.0 * std::numbers::pi * k / n_rotations;
    const Pose pose = grasp_frame_for_pair(pair, angle);
    if (!check_gripper_collision(pose, pair.width, gripper, mesh)) {
      out.push_back(GraspCandidate::from_pose(pose, pair.width));
    }
  }
  return out;
}

GraspPlan plan_grasps(const TriMesh& mesh, const GripperModel& gripper,
                      const PlannerParams& params) {
  gripper.validate();
  GraspPlan plan;
  plan.pairs = sample_antipodal_pairs(mesh, params.n_points, params.antipodal_tol, gripper,
                                      params.seed);
  for (std::size_t i = 0; i < plan.pairs.size(); ++i) {
    for (GraspCandidate& g : expand_pair_to_grasps(plan.pairs[i], mesh, gripper, params.n_rotations)) {
      g.pair_index = static_cast<int>(i);
      plan.candidates.push_back(g);
    }
  }
  return plan;
}

}  // namespace regrasp
