#pragma once

#include <cstdint>
#include <vector>

#include "regrasp/gripper.hpp"
#include "regrasp/mesh.hpp"

namespace regrasp {

struct ContactPair {
  Vec3 point_a;
  Vec3 point_b;
  Vec3 normal_a;
  Vec3 normal_b;
  double width = 0.0;
  int face_a = -1;
  int face_b = -1;
  int sample_index = -1;  // which surface sample produced the pair
};

// Parallel-jaw grasp in the object frame. closing_axis is pose.R.col(1).
struct GraspCandidate {
  Pose pose;
  double width = 0.0;
  Vec3 closing_axis = Vec3::UnitY();
  int pair_index = -1;

  static GraspCandidate from_pose(const Pose& pose, double width, int pair_index = -1);
};

struct PlannerParams {
  int n_points = 200;
  int n_rotations = 8;
  double antipodal_tol = 0.01;
  std::uint64_t seed = 0;
};

// Area-weighted surface samples; each sample casts a ray against its face
// normal and keeps the hit when the two normals are anti-parallel within
// antipodal_tol and the gap fits the gripper. Sample i depends only on
// (seed, i), so growing n_points only appends pairs. Throws NoPairsFound.
std::vector<ContactPair> sample_antipodal_pairs(const TriMesh& mesh, int n_points,
                                                double antipodal_tol, const GripperModel& gripper,
                                                std::uint64_t rng_seed);

// Spins the gripper about the pair axis at n_rotations uniform angles and
// keeps the collision-free poses.
std::vector<GraspCandidate> expand_pair_to_grasps(const ContactPair& pair, const TriMesh& mesh,
                                                  const GripperModel& gripper, int n_rotations);

// Gripper body boxes at `pose` (object frame) against the mesh. Finger inner
// faces are pulled back by kPadClearance.
bool check_gripper_collision(const Pose& pose, double width, const GripperModel& gripper,
                             const TriMesh& mesh);

// Gripper frame for a pair before spinning (angle 0 of the expansion).
Pose grasp_frame_for_pair(const ContactPair& pair, double angle);

struct GraspPlan {
  std::vector<ContactPair> pairs;
  std::vector<GraspCandidate> candidates;
};

GraspPlan plan_grasps(const TriMesh& mesh, const GripperModel& gripper,
                      const PlannerParams& params);

}  // namespace regrasp
