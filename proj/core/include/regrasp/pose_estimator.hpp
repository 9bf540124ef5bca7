#pragma once

#include "regrasp/geometry.hpp"

namespace regrasp {

enum class GraspRole { G1, G2, G3 };

// One executed grasp in the world frame: as planned (before admittance) and
// as reached (after admittance).
struct GraspRecord {
  Pose sim_pose;
  Pose real_pose;
  GraspRole role = GraspRole::G1;
};

// Uncertainty left after the first grasp: a turn about its closing axis and
// a shift in its pad plane (columns 0 and 2).
struct ErrorParams {
  double theta = 0.0;
  double delta_1 = 0.0;
  double delta_3 = 0.0;
  double epsilon = 0.0;
};

struct EstimationResult {
  Pose object_pose;
  double theta = 0.0;       // radians, about the first closing axis
  double epsilon = 0.0;     // meters, along d_allowed
  Vec3 d_allowed = Vec3::UnitZ();
  // Shift along d_allowed x n_g2 that puts the second-grasp estimate on the
  // first grasp's constraint plane. Zero when the first two closing axes are
  // orthogonal.
  double plane_correction = 0.0;
  double conditioning = 0.0;  // |det| of the three closing axes
};

struct EstimatorOptions {
  double singularity_tol = 0.05;
};

// Object pose implied by a grasp when the object kept its simulated pose
// relative to the hand: real grasp composed with the simulated grasp->object
// transform.
Pose ideal_pose_from_grasp(const GraspRecord& record, const Pose& sim_object_pose);

struct RotationEstimate {
  double theta = 0.0;
  Mat3 R_o_real = Mat3::Identity();
  double g2_deviation = 0.0;  // angle of the second grasp's world rotation change
};

// Turn of the object about the first grasp's closing axis r, read from how
// far the second grasp's closing axis swung about r during conformance.
// Throws AngleNearPi when the second grasp moved by nearly pi and
// SingularTriplet when its closing axis is parallel to r.
RotationEstimate identify_rotation_error(const GraspRecord& g1, const GraspRecord& g2,
                                         const Pose& sim_object_pose,
                                         const EstimatorOptions& options = {});

// Intersection direction of the pad planes of two grasps, n1 x n2 normalized
// with n = column0 x column2 of each real grasp rotation. Throws
// SingularTriplet when the planes are near parallel.
Vec3 allowed_translation_direction(const GraspRecord& g1, const GraspRecord& g2,
                                   double singularity_tol = 0.05);

EstimationResult estimate_pose(const GraspRecord& g1, const GraspRecord& g2,
                               const GraspRecord& g3, const Pose& sim_object_pose,
                               const EstimatorOptions& options = {});

}  // namespace regrasp
