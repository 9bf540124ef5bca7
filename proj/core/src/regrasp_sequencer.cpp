#include "regrasp/regrasp_sequencer.hpp"

#include <algorithm>
#include <map>

#include "regrasp/error.hpp"

namespace regrasp {

const char* to_string(ArmId id) { return id == ArmId::A ? "A" : "B"; }

ArmId arm_from_string(const std::string& s) {
  if (s == "A") return ArmId::A;
  if (s == "B") return ArmId::B;
  throw Error(ErrorCode::InvalidInput, "unknown arm id: " + s);
}

const char* to_string(Phase phase) {
  switch (phase) {
    case Phase::Pick: return "pick";
    case Phase::HandoverGive: return "handover-give";
    case Phase::HandoverReceive: return "handover-receive";
    case Phase::Release: return "release";
    case Phase::Place: return "place";
  }
  return "?";
}

Phase phase_from_string(const std::string& s) {
  for (Phase p : {Phase::Pick, Phase::HandoverGive, Phase::HandoverReceive, Phase::Release,
                  Phase::Place}) {
    if (s == to_string(p)) return p;
  }
  throw Error(ErrorCode::InvalidInput, "unknown phase: " + s);
}

bool check_handover_compatibility(const GraspCandidate& give, const GraspCandidate& receive,
                                  const Pose& object_pose, const GripperModel& gripper,
                                  const TriMesh& /*mesh*/) {
  const auto a = gripper_boxes_world(gripper, object_pose * give.pose, give.width);
  const auto b = gripper_boxes_world(gripper, object_pose * receive.pose, receive.width);
  return !any_box_intersects(a, b);
}

namespace {

class Search {
 public:
  Search(std::span<const GraspCandidate> candidates, const RegraspScene& scene,
         const GripperModel& gripper, const TriMesh& mesh, const SequencerOptions& options)
      : candidates_(candidates), scene_(scene), gripper_(gripper), mesh_(mesh), options_(options) {}

  // Approach/retreat segment along -z of the grasp frame, from the grasp pose
  // outward, against the object and optionally a second gripper.
  bool line_clear(int g, const Pose& object_pose, const std::vector<OrientedBox>* other) const {
    const GraspCandidate& c = candidates_[static_cast<std::size_t>(g)];
    const Pose grasp = object_pose * c.pose;
    const double length = options_.line_length_factor * gripper_.finger_depth;
    const int n = std::max(options_.line_samples, 2);
    for (int k = 0; k < n; ++k) {
      const double s = length * k / (n - 1);
      const Pose at{grasp.R, grasp.p - s * grasp.R.col(2)};
      const auto boxes = gripper_boxes_world(gripper_, at, c.width, kPadClearance);
      for (const OrientedBox& b : boxes) {
        if (box_intersects_mesh(b, mesh_, object_pose)) return false;
      }
      if (other && any_box_intersects(boxes, *other)) return false;
    }
    return true;
  }

  std::vector<OrientedBox> boxes(int g, const Pose& object_pose) const {
    const GraspCandidate& c = candidates_[static_cast<std::size_t>(g)];
    return gripper_boxes_world(gripper_, object_pose * c.pose, c.width);
  }

  bool reachable(const ArmModel& arm, int g, const Pose& object_pose) const {
    return arm.workspace.contains((object_pose * candidates_[static_cast<std::size_t>(g)].pose).p);
  }

  bool g1_ok(int g) {
    return memo(g1_, g, [&] {
      return reachable(scene_.arm_a, g, scene_.object_start) &&
             reachable(scene_.arm_a, g, scene_.handover) &&
             line_clear(g, scene_.object_start, nullptr);
    });
  }

  bool g2_ok(int g) {
    return memo(g2_, g, [&] { return reachable(scene_.arm_b, g, scene_.handover); });
  }

  bool g3_ok(int g) {
    return memo(g3_, g, [&] {
      return reachable(scene_.arm_a, g, scene_.handover) &&
             reachable(scene_.arm_a, g, scene_.object_goal) &&
             line_clear(g, scene_.object_goal, nullptr);
    });
  }

  // Holder `hold` stays on while `moving` approaches (or retreats) and vice
  // versa: the exchange of a handover.
  bool exchange_ok(int hold, int moving) {
    const auto key = std::make_pair(hold, moving);
    if (auto it = exchange_.find(key); it != exchange_.end()) return it->second;
    const Pose& h = scene_.handover;
    bool ok = check_handover_compatibility(candidates_[static_cast<std::size_t>(hold)],
                                           candidates_[static_cast<std::size_t>(moving)], h,
                                           gripper_, mesh_);
    if (ok) {
      const auto hold_boxes = boxes(hold, h);
      const auto moving_boxes = boxes(moving, h);
      ok = line_clear(moving, h, &hold_boxes) && line_clear(hold, h, &moving_boxes);
    }
    exchange_.emplace(key, ok);
    return ok;
  }

 private:
  template <typename F>
  static bool memo(std::map<int, bool>& cache, int g, F&& f) {
    if (auto it = cache.find(g); it != cache.end()) return it->second;
    const bool ok = f();
    cache.emplace(g, ok);
    return ok;
  }

  std::span<const GraspCandidate> candidates_;
  const RegraspScene& scene_;
  const GripperModel& gripper_;
  const TriMesh& mesh_;
  SequencerOptions options_;
  std::map<int, bool> g1_, g2_, g3_;
  std::map<std::pair<int, int>, bool> exchange_;
};

RegraspPlan build_plan(int triplet_index, const Triplet& triplet, std::array<int, 3> g,
                       std::span<const GraspCandidate> candidates, const RegraspScene& scene) {
  RegraspPlan plan;
  plan.triplet_index = triplet_index;
  plan.triplet = triplet;
  plan.grasps = g;
  auto step = [&](ArmId arm, int grasp, const Pose& object, Phase phase) {
    plan.steps.push_back(
        {arm, grasp, object * candidates[static_cast<std::size_t>(grasp)].pose, object, phase});
  };
  step(ArmId::A, g[0], scene.object_start, Phase::Pick);
  step(ArmId::A, g[0], scene.handover, Phase::HandoverGive);
  step(ArmId::B, g[1], scene.handover, Phase::HandoverReceive);
  step(ArmId::A, g[0], scene.handover, Phase::Release);
  step(ArmId::B, g[1], scene.handover, Phase::HandoverGive);
  step(ArmId::A, g[2], scene.handover, Phase::HandoverReceive);
  step(ArmId::B, g[1], scene.handover, Phase::Release);
  step(ArmId::A, g[2], scene.object_goal, Phase::Place);
  return plan;
}

}  // namespace

RegraspPlan plan_sequence(std::span<const Triplet> triplets, std::span<const GraspGroup> groups,
                          std::span<const GraspCandidate> candidates, const RegraspScene& scene,
                          const GripperModel& gripper, const TriMesh& mesh,
                          const SequencerOptions& options) {
  if (triplets.empty()) throw Error(ErrorCode::PlanNotFound, "no triplets to search");
  if (!is_valid_pose(scene.object_start) || !is_valid_pose(scene.object_goal) ||
      !is_valid_pose(scene.handover)) {
    throw Error(ErrorCode::InvalidInput, "scene poses must be valid rigid transforms");
  }
  Search search(candidates, scene, gripper, mesh, options);

  for (std::size_t t = 0; t < triplets.size(); ++t) {
    const Triplet& triplet = triplets[t];
    // Role assignments of the three groups, in lexicographic permutation order.
    std::array<int, 3> roles{0, 1, 2};
    do {
      const auto& m1 = groups[static_cast<std::size_t>(triplet.groups[static_cast<std::size_t>(roles[0])])].members;
      const auto& m2 = groups[static_cast<std::size_t>(triplet.groups[static_cast<std::size_t>(roles[1])])].members;
      const auto& m3 = groups[static_cast<std::size_t>(triplet.groups[static_cast<std::size_t>(roles[2])])].members;
      std::map<int, bool> g2_dead;  // g2 members with no feasible g3
      for (int g1 : m1) {
        if (!search.g1_ok(g1)) continue;
        for (int g2 : m2) {
          if (g2_dead[g2] || !search.g2_ok(g2) || !search.exchange_ok(g1, g2)) continue;
          for (int g3 : m3) {
            if (search.g3_ok(g3) && search.exchange_ok(g2, g3)) {
              return build_plan(static_cast<int>(t), triplet, {g1, g2, g3}, candidates, scene);
            }
          }
          g2_dead[g2] = true;
        }
      }
    } while (std::next_permutation(roles.begin(), roles.end()));
  }
  throw Error(ErrorCode::PlanNotFound, "exhausted " + std::to_string(triplets.size()) +
                                           " triplets without a feasible grasp sequence");
}

}  // namespace regrasp
