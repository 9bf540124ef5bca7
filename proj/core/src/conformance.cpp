#include "regrasp/conformance.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "regrasp/error.hpp"

namespace regrasp {

namespace {

bool is_spd(const Mat3& m) {
  if (!m.allFinite() || (m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * m.cwiseAbs().maxCoeff()) {
    return false;
  }
  Eigen::LLT<Mat3> llt(m);
  return llt.info() == Eigen::Success;
}

std::optional<ContactPlane> exit_plane(const Pose& object_pose, const TriMesh& mesh,
                                       const Vec3& origin, const Vec3& direction) {
  const Pose inv = invert(object_pose);
  const Ray ray(inv.transform_point(origin), inv.transform_vector(direction));
  const auto hit = ray_mesh_exit(ray, mesh);
  if (!hit) return std::nullopt;
  return ContactPlane{object_pose.transform_point(hit->point),
                      object_pose.transform_vector(hit->normal), hit->face};
}

}  // namespace

void AdmittanceParams::validate() const {
  for (const Mat3* m : {&M, &B, &K, &M_r, &B_r, &K_r}) {
    if (!is_spd(*m)) throw Error(ErrorCode::InvalidInput, "admittance matrices must be SPD");
  }
  if (!(dt > 0.0) || !f_d.allFinite()) throw Error(ErrorCode::InvalidInput, "bad dt or f_d");
}

void ContactModel::validate() const {
  if (!(pad_stiffness > 0.0) || samples_per_side < 1) {
    throw Error(ErrorCode::InvalidInput, "pad stiffness and sample count must be positive");
  }
}

PadContacts find_pad_contacts(const Pose& gripper_pose, const Pose& object_pose,
                              const TriMesh& mesh) {
  const Vec3 y = gripper_pose.R.col(1);
  return {exit_plane(object_pose, mesh, gripper_pose.p, -y),
          exit_plane(object_pose, mesh, gripper_pose.p, y)};
}

Wrench reaction_wrench(const Pose& gripper_pose, double width, const Pose& true_object_pose,
                       const TriMesh& mesh, const GripperModel& gripper,
                       const ContactModel& contact) {
  const PadContacts pads = find_pad_contacts(gripper_pose, true_object_pose, mesh);
  const int n = contact.samples_per_side;
  const double k = contact.pad_stiffness / (n * n);
  Wrench w;
  for (int pad = 0; pad < 2; ++pad) {
    const auto& plane = pad == 0 ? pads.pad_a : pads.pad_b;
    if (!plane) continue;
    for (const Vec3& local : gripper.pad_samples(width, n, pad)) {
      const Vec3 s = gripper_pose.transform_point(local);
      const double depth = plane->normal.dot(plane->point - s);
      if (depth <= 0.0) continue;
      // The pad pushes into the face: force along the inward contact normal.
      const Vec3 f = -k * depth * plane->normal;
      w.force += f;
      w.torque += (s - gripper_pose.p).cross(f);
    }
  }
  return w;
}

MotionState admittance_step(const MotionState& measured, const MotionState& desired,
                            const Wrench& wrench, const AdmittanceParams& p, bool rotational) {
  MotionState next = desired;
  const double dt = p.dt;

  const Vec3 e = measured.pose.p - desired.pose.p;
  const Vec3 ed = measured.linear_velocity - desired.linear_velocity;
  const Vec3 edd = p.M.llt().solve(wrench.force + p.f_d - p.B * ed - p.K * e);
  const Vec3 ed1 = ed + dt * edd;
  const Vec3 e1 = e + dt * ed1;
  const Vec3 p_next = measured.pose.p + dt * measured.linear_velocity;
  next.pose.p = p_next - e1;
  next.linear_velocity = measured.linear_velocity - ed1;

  if (rotational) {
    const Vec3 r = log_so3(measured.pose.R * desired.pose.R.transpose());
    const Vec3 rd = measured.angular_velocity - desired.angular_velocity;
    const Vec3 rdd = p.M_r.llt().solve(wrench.torque - p.B_r * rd - p.K_r * r);
    const Vec3 rd1 = rd + dt * rdd;
    const Vec3 r1 = r + dt * rd1;
    const Mat3 R_next = exp_so3(dt * measured.angular_velocity) * measured.pose.R;
    next.pose.R = orthonormalize(exp_so3(-r1) * R_next);
    next.angular_velocity = measured.angular_velocity - rd1;
  }
  return next;
}

ConformanceResult conform_grasp(const Pose& planned, double width, const Pose& true_object_pose,
                                const TriMesh& mesh, const GripperModel& gripper,
                                const ContactModel& contact, const AdmittanceParams& params,
                                const ConformanceOptions& options, int trace_every) {
  params.validate();
  contact.validate();
  if (options.max_steps < 1) throw Error(ErrorCode::InvalidInput, "max_steps must be positive");

  ConformanceResult result;
  MotionState hand;
  hand.pose = planned;
  double best = std::numeric_limits<double>::infinity();

  for (int step = 1; step <= options.max_steps; ++step) {
    const Wrench w = reaction_wrench(hand.pose, width, true_object_pose, mesh, gripper, contact);
    const double fn = w.force.norm();
    const double tn = options.rotational ? w.torque.norm() : 0.0;
    if (trace_every > 0 && (step - 1) % trace_every == 0) {
      result.trace.push_back({step, w.force, w.torque, hand.pose.p});
    }
    const double score = std::max(fn / options.force_tol, tn / options.torque_tol);
    if (score < best) {
      best = score;
      result.conformed_pose = hand.pose;
      result.residual_force = w.force;
      result.residual_torque = w.torque;
      result.steps_used = step;
    }
    if (fn < options.force_tol && tn < options.torque_tol) {
      result.converged = true;
      result.steps_used = step;
      break;
    }
    // The spring anchor sits on the hand's own pose (measured at rest), so
    // only inertia and damping shape the motion and the hand stops wherever
    // the contact wrench vanishes.
    MotionState anchor;
    anchor.pose = hand.pose;
    hand = admittance_step(anchor, hand, w, params, options.rotational);
  }
  const double c = std::clamp(planned.R.col(1).dot(result.conformed_pose.R.col(1)), -1.0, 1.0);
  result.redirected = std::acos(c) > options.redirect_tol;
  return result;
}

bool contact_is_valid(const Pose& gripper_pose, const Pose& object_pose, const TriMesh& mesh,
                      double expected_gap, double angle_tol, double gap_tol) {
  const PadContacts pads = find_pad_contacts(gripper_pose, object_pose, mesh);
  if (!pads.pad_a || !pads.pad_b) return false;
  const Vec3 y = gripper_pose.R.col(1);
  const double c = std::cos(angle_tol);
  if (pads.pad_b->normal.dot(y) < c || pads.pad_a->normal.dot(-y) < c) return false;
  if (pads.pad_a->normal.dot(pads.pad_b->normal) > -(1.0 - 1e-12)) return false;
  const double gap = pads.pad_b->normal.dot(pads.pad_b->point - pads.pad_a->point);
  return std::abs(gap - expected_gap) <= gap_tol;
}

}  // namespace regrasp
