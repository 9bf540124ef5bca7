#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "regrasp/grasp_planner.hpp"
#include "regrasp/triplet_selector.hpp"

namespace regrasp {

enum class ArmId { A, B };
const char* to_string(ArmId id);
ArmId arm_from_string(const std::string& s);

// Free-flying gripper standing in for a robot arm: any gripper pose whose
// origin lies in the workspace box is reachable.
struct ArmModel {
  ArmId id = ArmId::A;
  Aabb workspace;
  Pose home;
};

enum class Phase { Pick, HandoverGive, HandoverReceive, Release, Place };
const char* to_string(Phase phase);
Phase phase_from_string(const std::string& s);

struct PlanStep {
  ArmId arm = ArmId::A;
  int grasp = -1;       // candidate index
  Pose gripper_pose;    // world
  Pose object_pose;     // world
  Phase phase = Phase::Pick;
};

struct RegraspPlan {
  int triplet_index = -1;
  Triplet triplet;
  std::array<int, 3> grasps{-1, -1, -1};  // g1 (arm A), g2 (arm B), g3 (arm A)
  std::vector<PlanStep> steps;
};

struct RegraspScene {
  Pose object_start;
  Pose object_goal;
  Pose handover;
  ArmModel arm_a{ArmId::A, {}, {}};
  ArmModel arm_b{ArmId::B, {}, {}};
};

struct SequencerOptions {
  int line_samples = 10;          // samples on each approach/retreat segment
  double line_length_factor = 2;  // segment length in finger depths
};

// Incremental search: triplets in the given order, then g1, g2, g3 members in
// lexicographic order; returns the first combination for which every
// configuration and approach segment is feasible. Throws PlanNotFound.
RegraspPlan plan_sequence(std::span<const Triplet> triplets, std::span<const GraspGroup> groups,
                          std::span<const GraspCandidate> candidates, const RegraspScene& scene,
                          const GripperModel& gripper, const TriMesh& mesh,
                          const SequencerOptions& options = {});

// True iff the two grippers, both holding the object at object_pose, keep
// their body boxes apart.
bool check_handover_compatibility(const GraspCandidate& give, const GraspCandidate& receive,
                                  const Pose& object_pose, const GripperModel& gripper,
                                  const TriMesh& mesh);

// Standalone re-check of every plan invariant. Returns the violations found;
// empty means the plan is valid. Uses its own geometry routines rather than
// the sequencer's.
std::vector<std::string> validate_plan(const RegraspPlan& plan,
                                       std::span<const GraspGroup> groups,
                                       std::span<const GraspCandidate> candidates,
                                       const RegraspScene& scene, const GripperModel& gripper);

}  // namespace regrasp
