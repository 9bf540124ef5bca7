#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "regrasp/gripper.hpp"
#include "regrasp/mesh.hpp"

namespace regrasp {

// Virtual inertia/damping/stiffness of the admittance law, translational and
// rotational. f_d is the target force, zero so that the hand exerts nothing
// beyond the grasp itself.
struct AdmittanceParams {
  Mat3 M = Mat3::Identity();
  Mat3 B = 40.0 * Mat3::Identity();
  Mat3 K = 400.0 * Mat3::Identity();
  Mat3 M_r = 1e-3 * Mat3::Identity();
  Mat3 B_r = 0.025 * Mat3::Identity();
  Mat3 K_r = 0.15 * Mat3::Identity();
  Vec3 f_d = Vec3::Zero();
  double dt = 1e-3;

  // Throws InvalidInput unless all matrices are SPD and dt > 0.
  void validate() const;
};

// Penalty contact between the flat pads and the object. Each pad carries
// samples_per_side^2 springs sharing pad_stiffness.
struct ContactModel {
  double pad_stiffness = 5000.0;  // N/m per pad under uniform penetration
  int samples_per_side = 4;
  bool sufficient_friction = true;

  void validate() const;
};

struct Wrench {
  Vec3 force = Vec3::Zero();
  Vec3 torque = Vec3::Zero();  // about the gripper origin
};

// Pose plus world-frame twist.
struct MotionState {
  Pose pose;
  Vec3 linear_velocity = Vec3::Zero();
  Vec3 angular_velocity = Vec3::Zero();
};

struct ContactPlane {
  Vec3 point;   // world
  Vec3 normal;  // outward, world
  int face = -1;
};

// Faces each pad presses on: the first face through which a ray from the
// gripper origin along -y (pad A) or +y (pad B) leaves the object.
struct PadContacts {
  std::optional<ContactPlane> pad_a;
  std::optional<ContactPlane> pad_b;
};

PadContacts find_pad_contacts(const Pose& gripper_pose, const Pose& object_pose,
                              const TriMesh& mesh);

// Penalty wrench on the hand: sum over pad samples of stiffness times
// penetration times the inward pad normal; torque about the gripper origin.
Wrench reaction_wrench(const Pose& gripper_pose, double width, const Pose& true_object_pose,
                       const TriMesh& mesh, const GripperModel& gripper,
                       const ContactModel& contact);

// One semi-implicit Euler step of
//   M (xdd_p - xdd_d) + B (xd_p - xd_d) + K (x_p - x_d) = f + f_d
// in the error e = x_p - x_d (rotation: world rotation vector of
// R_p R_d^T). The measured state is held over the step at its current
// velocity. Returns the updated desired state.
MotionState admittance_step(const MotionState& measured, const MotionState& desired,
                            const Wrench& wrench, const AdmittanceParams& params,
                            bool rotational = true);

struct ConformanceOptions {
  double force_tol = 1e-3;
  double torque_tol = 1e-4;
  int max_steps = 20000;
  bool rotational = true;
  double redirect_tol = 10.0 * 3.14159265358979323846 / 180.0;
};

struct TraceSample {
  int step = 0;
  Vec3 force;
  Vec3 torque;
  Vec3 position;
};

struct ConformanceResult {
  Pose conformed_pose;
  Vec3 residual_force = Vec3::Zero();
  Vec3 residual_torque = Vec3::Zero();
  int steps_used = 0;
  bool converged = false;
  bool redirected = false;  // closing axis turned by more than redirect_tol
  std::vector<TraceSample> trace;
};

// Closes the fingers to `width` at `planned` and lets the admittance law move
// the hand until the contact wrench vanishes. The spring anchor follows the
// hand, so the hand settles where the pads balance instead of being pulled
// back toward the plan. The object pose is only read.
ConformanceResult conform_grasp(const Pose& planned, double width, const Pose& true_object_pose,
                                const TriMesh& mesh, const GripperModel& gripper,
                                const ContactModel& contact, const AdmittanceParams& params,
                                const ConformanceOptions& options = {},
                                int trace_every = 0);

// Both pads find parallel faces whose spacing matches `expected_gap` and whose
// normals lie within angle_tol of the gripper closing axis.
bool contact_is_valid(const Pose& gripper_pose, const Pose& object_pose, const TriMesh& mesh,
                      double expected_gap, double angle_tol, double gap_tol = 1e-6);

}  // namespace regrasp
