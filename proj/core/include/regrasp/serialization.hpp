#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "regrasp/conformance.hpp"
#include "regrasp/experiment.hpp"
#include "regrasp/grasp_planner.hpp"
#include "regrasp/pose_estimator.hpp"
#include "regrasp/regrasp_sequencer.hpp"
#include "regrasp/triplet_selector.hpp"

// JSON formats used by the command-line tool. Poses are written as 12 numbers:
// R row-major followed by p. Readers also accept {"rotvec": [..], "p": [..]}.
namespace regrasp::io {

using nlohmann::json;

json read_json(const std::string& path);
// Pretty-printed, trailing newline. Output depends only on the value.
void write_json(const json& value, const std::string& path);

json to_json(const Vec3& v);
Vec3 vec3_from_json(const json& j);
json to_json(const Pose& pose);
Pose pose_from_json(const json& j);
Mat3 mat3_from_json(const json& j);  // scalar s means s * I

json to_json(const GraspCandidate& g);
GraspCandidate grasp_from_json(const json& j);

json to_json(const GripperModel& g);
GripperModel gripper_from_json(const json& j, GripperModel base = {});

json grasps_document(const std::vector<GraspCandidate>& grasps, const std::string& mesh,
                     double mesh_scale, const PlannerParams& params,
                     const GripperModel& gripper);
std::vector<GraspCandidate> grasps_from_document(const json& doc);

json triplets_document(const std::vector<GraspGroup>& groups,
                       const std::vector<Triplet>& triplets);
std::vector<GraspGroup> groups_from_document(const json& doc);
std::vector<Triplet> triplets_from_document(const json& doc);

json to_json(const ArmModel& arm);
ArmModel arm_from_json(const json& j);
RegraspScene scene_from_json(const json& j);

json to_json(const RegraspPlan& plan);
RegraspPlan plan_from_json(const json& j);

// Admittance / contact / conformance settings share one flat object.
void admittance_from_json(const json& j, AdmittanceParams& params, ContactModel& contact,
                          ConformanceOptions& options, double& closure_margin);

json to_json(const GraspRecord& r);
GraspRecord record_from_json(const json& j);

json to_json(const EstimationResult& e);

TrialConfig config_from_json(const json& j);
json summary_json(const TrialReport& report);

}  // namespace regrasp::io
