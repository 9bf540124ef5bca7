#pragma once

#include "regrasp/experiment.hpp"
#include "regrasp/shapes.hpp"

namespace fixture {

using namespace regrasp;

inline ArmModel open_arm(ArmId id) {
  return {id, Aabb(Vec3::Constant(-2.0), Vec3::Constant(2.0)), {}};
}

// Table-top scene: start and goal on either side, handover above.
inline RegraspScene table_scene() {
  RegraspScene s;
  s.object_start = Pose::from_translation({0.30, 0.0, 0.05});
  s.object_goal = Pose(exp_so3({0.0, 0.0, 1.0}), {-0.30, 0.05, 0.05});
  s.handover = Pose(exp_so3({0.3, -0.2, 0.1}), {0.0, 0.0, 0.35});
  s.arm_a = open_arm(ArmId::A);
  s.arm_b = open_arm(ArmId::B);
  return s;
}

inline std::vector<NamedPose> three_placements() {
  return {{"L1", Pose::from_translation({0.30, 0.00, 0.05})},
          {"L2", Pose(exp_so3({0.0, 0.0, 0.8}), {0.25, 0.10, 0.05})},
          {"L3", Pose(exp_so3({0.0, 0.0, -1.2}), {0.35, -0.10, 0.05})}};
}

inline TrialConfig experiment(const std::string& mesh = "builtin:l-square") {
  TrialConfig c;
  const RegraspScene s = table_scene();
  c.mesh = mesh;
  c.placements = three_placements();
  c.object_goal = s.object_goal;
  c.handover = s.handover;
  c.arm_a = s.arm_a;
  c.arm_b = s.arm_b;
  c.seed = 7;
  c.planner.seed = 7;
  return c;
}

}  // namespace fixture
