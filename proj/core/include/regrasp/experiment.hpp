#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "regrasp/conformance.hpp"
#include "regrasp/grasp_planner.hpp"
#include "regrasp/pose_estimator.hpp"
#include "regrasp/random.hpp"
#include "regrasp/regrasp_sequencer.hpp"

namespace regrasp {

struct NamedPose {
  std::string name;
  Pose pose;
};

struct TruthRanges {
  double max_theta = 5.0 * std::numbers::pi / 180.0;  // radians
  double max_delta = 0.010;                           // meters, per in-plane axis
};

struct NoiseModel {
  double sigma_p = 0.0;  // meters, per axis on conformed translations
  double sigma_r = 0.0;  // radians, per axis on conformed rotation vectors
};

struct TrialConfig {
  std::string mesh = "builtin:l-square";
  double mesh_scale = 0.001;
  std::vector<NamedPose> placements;
  Pose object_goal;
  Pose handover;
  ArmModel arm_a{ArmId::A, {}, {}};
  ArmModel arm_b{ArmId::B, {}, {}};

  TruthRanges ranges;
  NoiseModel noise;
  int n_repeats = 1;
  std::uint64_t seed = 0;

  PlannerParams planner;
  double group_tol = kDefaultGroupTol;
  double singularity_tol = kDefaultSingularityTol;
  GripperModel gripper;
  ContactModel contact;
  AdmittanceParams admittance;
  ConformanceOptions conformance{1e-9, 1e-12, 20000, true, 10.0 * std::numbers::pi / 180.0};
  double closure_margin = 0.002;  // commanded width = face gap - margin
  int max_truth_resamples = 1000;
  int threads = 1;
  bool keep_traces = false;

  // Throws InvalidInput on violated invariants.
  void validate() const;
};

// Sampled ground truth and the parameters that produced it.
struct TruthSample {
  Pose object_pose;
  ErrorParams params;
};

// Applies a turn theta about the first grasp's real closing axis and a shift
// delta_1 * column0 + delta_3 * column2 of that grasp, with all three drawn
// uniformly from `ranges`. The object stays flush with the first grasp's pads.
// `sim_object_pose` is the pose the first grasp implies for the object.
TruthSample inject_truth(const Pose& sim_object_pose, const Pose& g1_real,
                         const TruthRanges& ranges, Rng& rng);
// Deterministic variant for fixed parameters.
Pose apply_truth(const Pose& sim_object_pose, const Pose& g1_real, const ErrorParams& params);

struct TrialRow {
  std::string placement;
  int placement_index = 0;
  int repeat = 0;
  Vec3 g2_dp_mm, g3_dp_mm, object_dp_mm;
  Vec3 g2_dw_deg, g3_dw_deg, object_dw_deg;
  int truth_resamples = 0;
  EstimationResult estimate;
  ErrorParams truth;
  std::vector<TraceSample> g2_trace, g3_trace;
};

struct AxisStats {
  Vec3 mean = Vec3::Zero();
  Vec3 std = Vec3::Zero();  // sample standard deviation (n - 1); zero for n = 1
};

struct BlockStats {
  AxisStats dp_mm;
  AxisStats dw_deg;
};

struct PlacementSummary {
  std::string name;
  int n = 0;
  RegraspPlan plan;
  BlockStats g2, g3, object;
};

struct TrialReport {
  std::vector<TrialRow> rows;
  std::vector<PlacementSummary> placements;
  BlockStats g2, g3, object;  // pooled over placements
  int n_candidates = 0;
  int n_groups = 0;
};

// World-frame rotation vector of a * b^T, in degrees.
Vec3 rotation_difference_deg(const Mat3& a, const Mat3& b);

AxisStats axis_stats(const std::vector<Vec3>& samples);

TrialReport run_experiment(const TrialConfig& config);
TrialReport run_experiment(const TrialConfig& config, const TriMesh& mesh);

void write_trials_csv(const TrialReport& report, std::ostream& out);
void write_traces_csv(const TrialReport& report, std::ostream& out);

}  // namespace regrasp
