#include <algorithm>
#include <cmath>

#include "regrasp/regrasp_sequencer.hpp"

// Standalone plan checker. It deliberately avoids the collision module so a
// bug there cannot hide a bad plan.

namespace regrasp {

namespace {

// Box overlap test in the first box's frame (rotation R = A^T B), written
// separately from the collision module so the validator does not share its
// failure modes.
bool boxes_overlap(const OrientedBox& a, const OrientedBox& b) {
  const Mat3 R = a.frame.R.transpose() * b.frame.R;
  const Vec3 t = a.frame.R.transpose() * (b.frame.p - a.frame.p);
  const Mat3 absR = R.cwiseAbs().array() + 1e-12;
  const Vec3& ea = a.half_extents;
  const Vec3& eb = b.half_extents;
  for (int i = 0; i < 3; ++i) {
    if (std::abs(t[i]) > ea[i] + absR.row(i).dot(eb)) return false;
  }
  for (int j = 0; j < 3; ++j) {
    if (std::abs(t.dot(R.col(j))) > absR.col(j).dot(ea) + eb[j]) return false;
  }
  for (int i = 0; i < 3; ++i) {
    const int i1 = (i + 1) % 3, i2 = (i + 2) % 3;
    for (int j = 0; j < 3; ++j) {
      const int j1 = (j + 1) % 3, j2 = (j + 2) % 3;
      const double ra = ea[i1] * absR(i2, j) + ea[i2] * absR(i1, j);
      const double rb = eb[j1] * absR(i, j2) + eb[j2] * absR(i, j1);
      const double dist = std::abs(t[i2] * R(i1, j) - t[i1] * R(i2, j));
      if (dist > ra + rb) return false;
    }
  }
  return true;
}

}  // namespace

std::vector<std::string> validate_plan(const RegraspPlan& plan,
                                       std::span<const GraspGroup> groups,
                                       std::span<const GraspCandidate> candidates,
                                       const RegraspScene& scene, const GripperModel& gripper) {
  std::vector<std::string> errors;
  const auto n_cand = static_cast<int>(candidates.size());

  // Grasps: three distinct candidates, one from each group of the triplet.
  std::vector<int> used_groups;
  for (int g : plan.grasps) {
    if (g < 0 || g >= n_cand) {
      errors.push_back("grasp index " + std::to_string(g) + " out of range");
      return errors;
    }
    int owner = -1;
    for (int k : plan.triplet.groups) {
      if (k < 0 || k >= static_cast<int>(groups.size())) continue;
      const auto& m = groups[static_cast<std::size_t>(k)].members;
      if (std::find(m.begin(), m.end(), g) != m.end()) owner = k;
    }
    if (owner < 0) errors.push_back("grasp " + std::to_string(g) + " is not in the triplet's groups");
    used_groups.push_back(owner);
  }
  if (plan.grasps[0] == plan.grasps[1] || plan.grasps[1] == plan.grasps[2] ||
      plan.grasps[0] == plan.grasps[2]) {
    errors.push_back("grasps are not distinct");
  }
  std::sort(used_groups.begin(), used_groups.end());
  if (std::adjacent_find(used_groups.begin(), used_groups.end()) != used_groups.end()) {
    errors.push_back("two grasps come from the same group");
  }

  // Steps: every grasp in the plan's list, consistent poses, workspaces.
  const Phase expected[] = {Phase::Pick, Phase::HandoverGive, Phase::HandoverReceive,
                            Phase::Release, Phase::HandoverGive, Phase::HandoverReceive,
                            Phase::Release, Phase::Place};
  if (plan.steps.size() != std::size(expected)) {
    errors.push_back("expected 8 steps, got " + std::to_string(plan.steps.size()));
    return errors;
  }
  const ArmModel* arms[2] = {&scene.arm_a, &scene.arm_b};
  std::vector<int> distinct;
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const PlanStep& s = plan.steps[i];
    const std::string where = "step " + std::to_string(i) + ": ";
    if (s.phase != expected[i]) errors.push_back(where + "unexpected phase " + to_string(s.phase));
    if (s.grasp < 0 || s.grasp >= n_cand) {
      errors.push_back(where + "grasp out of range");
      continue;
    }
    if (std::find(plan.grasps.begin(), plan.grasps.end(), s.grasp) == plan.grasps.end()) {
      errors.push_back(where + "grasp not among the plan's three");
    }
    if (std::find(distinct.begin(), distinct.end(), s.grasp) == distinct.end()) distinct.push_back(s.grasp);
    // Gripper pose must be the object pose carrying the grasp.
    const Mat3 R = s.object_pose.R * candidates[static_cast<std::size_t>(s.grasp)].pose.R;
    const Vec3 p = s.object_pose.R * candidates[static_cast<std::size_t>(s.grasp)].pose.p + s.object_pose.p;
    if ((R - s.gripper_pose.R).cwiseAbs().maxCoeff() > 1e-9 || (p - s.gripper_pose.p).norm() > 1e-9) {
      errors.push_back(where + "gripper pose does not match object pose and grasp");
    }
    const Aabb& ws = arms[s.arm == ArmId::A ? 0 : 1]->workspace;
    const Vec3& q = s.gripper_pose.p;
    for (int k = 0; k < 3; ++k) {
      if (q[k] < ws.min[k] || q[k] > ws.max[k]) {
        errors.push_back(where + "gripper outside arm " + to_string(s.arm) + " workspace");
        break;
      }
    }
  }
  if (distinct.size() != 3) errors.push_back("plan uses " + std::to_string(distinct.size()) + " grasps");

  const auto& st = plan.steps;
  auto same_pose = [](const Pose& a, const Pose& b) {
    return (a.R - b.R).cwiseAbs().maxCoeff() <= 1e-12 && (a.p - b.p).norm() <= 1e-12;
  };
  if (!same_pose(st.front().object_pose, scene.object_start)) errors.push_back("pick is not at the start pose");
  if (!same_pose(st.back().object_pose, scene.object_goal)) errors.push_back("place is not at the goal pose");
  for (std::size_t i = 1; i + 1 < st.size(); ++i) {
    if (!same_pose(st[i].object_pose, scene.handover)) {
      errors.push_back("step " + std::to_string(i) + " is not at the handover pose");
    }
  }
  if (st[0].arm != ArmId::A || st[7].arm != ArmId::A) errors.push_back("arm A must pick and place");

  // Handovers: giver and receiver differ, and their bodies stay apart.
  for (std::size_t i = 1; i + 1 < st.size(); ++i) {
    if (st[i].phase != Phase::HandoverGive || st[i + 1].phase != Phase::HandoverReceive) continue;
    if (st[i].arm == st[i + 1].arm) {
      errors.push_back("handover at step " + std::to_string(i) + " uses the same arm twice");
    }
    const auto& give = candidates[static_cast<std::size_t>(st[i].grasp)];
    const auto& recv = candidates[static_cast<std::size_t>(st[i + 1].grasp)];
    const auto ga = gripper.body_boxes(give.width);
    const auto gb = gripper.body_boxes(recv.width);
    bool hit = false;
    for (const OrientedBox& x : ga) {
      for (const OrientedBox& y : gb) {
        hit = hit || boxes_overlap({st[i].gripper_pose * x.frame, x.half_extents},
                                   {st[i + 1].gripper_pose * y.frame, y.half_extents});
      }
    }
    if (hit) errors.push_back("grippers collide at handover step " + std::to_string(i + 1));
  }
  return errors;
}

}  // namespace regrasp
