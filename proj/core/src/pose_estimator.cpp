#include "regrasp/pose_estimator.hpp"

#include <cmath>

#include "regrasp/error.hpp"

namespace regrasp {

namespace {

// Normal of a grasp's pad plane: column 0 x column 2 (minus the closing axis).
Vec3 pad_plane_normal(const Pose& grasp) { return grasp.R.col(0).cross(grasp.R.col(2)); }

}  // namespace

Pose ideal_pose_from_grasp(const GraspRecord& record, const Pose& sim_object_pose) {
  return compose(record.real_pose, relative(record.sim_pose, sim_object_pose));
}

RotationEstimate identify_rotation_error(const GraspRecord& g1, const GraspRecord& g2,
                                         const Pose& sim_object_pose,
                                         const EstimatorOptions& options) {
  const Vec3 r = g1.real_pose.R.col(1);
  // World-frame change of the second grasp; its log must exist.
  const Vec3 dev = log_so3(g2.real_pose.R * g2.sim_pose.R.transpose());

  // Swing of the second closing axis about r. For a deviation that is a pure
  // turn about r this equals the projection of `dev` onto r, and it stays
  // exact when the second axis is not orthogonal to r.
  const Vec3 a = g2.sim_pose.R.col(1);
  const Vec3 b = g2.real_pose.R.col(1);
  const Vec3 a_perp = a - a.dot(r) * r;
  const Vec3 b_perp = b - b.dot(r) * r;
  if (a_perp.norm() <= options.singularity_tol || b_perp.norm() <= options.singularity_tol) {
    throw Error(ErrorCode::SingularTriplet, "second closing axis is parallel to the first");
  }
  RotationEstimate out;
  out.theta = std::atan2(r.dot(a_perp.cross(b_perp)), a_perp.dot(b_perp));
  out.R_o_real = exp_so3(out.theta * r) * ideal_pose_from_grasp(g1, sim_object_pose).R;
  out.g2_deviation = dev.norm();
  return out;
}

Vec3 allowed_translation_direction(const GraspRecord& g1, const GraspRecord& g2,
                                   double singularity_tol) {
  const Vec3 c = pad_plane_normal(g1.real_pose).cross(pad_plane_normal(g2.real_pose));
  const double len = c.norm();
  if (len <= singularity_tol) {
    throw Error(ErrorCode::SingularTriplet, "pad planes of the first two grasps are parallel");
  }
  return c / len;
}

EstimationResult estimate_pose(const GraspRecord& g1, const GraspRecord& g2,
                               const GraspRecord& g3, const Pose& sim_object_pose,
                               const EstimatorOptions& options) {
  const RotationEstimate rot = identify_rotation_error(g1, g2, sim_object_pose, options);
  const Mat3& R = rot.R_o_real;

  const Vec3 n1 = pad_plane_normal(g1.real_pose);
  const Vec3 n2 = pad_plane_normal(g2.real_pose);
  const Vec3 n3 = pad_plane_normal(g3.real_pose);
  const Vec3 d = allowed_translation_direction(g1, g2, options.singularity_tol);
  const double along = n3.dot(d);
  if (std::abs(along) <= options.singularity_tol) {
    throw Error(ErrorCode::SingularTriplet, "third pad plane contains the allowed direction");
  }

  // Object position implied by a grasp once the rotation is corrected: the
  // simulated grasp->object offset re-expressed with the corrected relative
  // rotation, then carried by the real grasp.
  auto corrected = [&](const GraspRecord& g) {
    const Pose sim_rel = relative(g.sim_pose, sim_object_pose);
    const Mat3 rel_R_real = g.real_pose.R.transpose() * R;
    const Vec3 rel_p = rel_R_real * sim_rel.R.transpose() * sim_rel.p;
    return Vec3(g.real_pose.p + g.real_pose.R * rel_p);
  };

  const Vec3 q1 = ideal_pose_from_grasp(g1, sim_object_pose).p;
  const Vec3 q2 = corrected(g2);
  const Vec3 q3 = corrected(g3);

  // q2 lies on the second constraint plane. Slide it within that plane onto
  // the first (this is zero when the first two axes are orthogonal), then
  // along d onto the third.
  const Vec3 m = d.cross(n2);
  const double alpha = n1.dot(q1 - q2) / n1.dot(m);
  const Vec3 base = q2 + alpha * m;
  const double eps = n3.dot(q3 - base) / along;

  Mat3 N;
  N << n1, n2, n3;

  EstimationResult out;
  out.object_pose = Pose(R, base + eps * d);
  out.theta = rot.theta;
  out.epsilon = eps;
  out.d_allowed = d;
  out.plane_correction = alpha;
  out.conditioning = std::abs(N.determinant());
  return out;
}

}  // namespace regrasp
