#include "regrasp/geometry.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "regrasp/error.hpp"

namespace regrasp {

Pose compose(const Pose& a, const Pose& b) { return {a.R * b.R, a.R * b.p + a.p}; }

Pose invert(const Pose& a) {
  const Mat3 Rt = a.R.transpose();
  return {Rt, -(Rt * a.p)};
}

Pose relative(const Pose& a, const Pose& b) {
  const Mat3 Rt = a.R.transpose();
  return {Rt * b.R, Rt * (b.p - a.p)};
}

bool is_valid_rotation(const Mat3& R, double tol) {
  if (!R.allFinite()) return false;
  if ((R.transpose() * R - Mat3::Identity()).cwiseAbs().maxCoeff() > tol) return false;
  return std::abs(R.determinant() - 1.0) <= tol;
}

bool is_valid_pose(const Pose& pose, double tol) {
  return is_valid_rotation(pose.R, tol) && pose.p.allFinite();
}

Mat3 hat(const Vec3& w) {
  Mat3 m;
  m << 0.0, -w.z(), w.y(),
       w.z(), 0.0, -w.x(),
       -w.y(), w.x(), 0.0;
  return m;
}

Vec3 vee(const Mat3& s) { return {s(2, 1), s(0, 2), s(1, 0)}; }

Mat3 exp_so3(const Vec3& w) {
  const double theta2 = w.squaredNorm();
  const double theta = std::sqrt(theta2);
  double a;  // sin(t)/t
  double b;  // (1 - cos(t))/t^2
  if (theta < 1e-4) {
    a = 1.0 - theta2 / 6.0 + theta2 * theta2 / 120.0;
    b = 0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0;
  } else {
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / theta2;
  }
  const Mat3 W = hat(w);
  return Mat3::Identity() + a * W + b * (W * W);
}

double rotation_angle(const Mat3& R) {
  const double s = 0.5 * vee(R - R.transpose()).norm();
  const double c = 0.5 * (R.trace() - 1.0);
  return std::atan2(s, c);
}

Vec3 log_so3(const Mat3& R) {
  const double tr = R.trace();
  if (tr <= -1.0 + 1e-9) {
    throw Error(ErrorCode::AngleNearPi, "rotation angle too close to pi for a unique logarithm");
  }
  const Vec3 v = vee(R - R.transpose());  // 2 sin(t) * axis
  const double theta = rotation_angle(R);
  if (theta < 1e-4) {
    const double t2 = theta * theta;
    return 0.5 * (1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0) * v;
  }
  if (theta < 3.0) return (theta / (2.0 * std::sin(theta))) * v;

  // Near pi the antisymmetric part vanishes; take the axis from the symmetric
  // part (1 - cos t) a a^T and the sign from v.
  const Mat3 S = 0.5 * (R + R.transpose()) - std::cos(theta) * Mat3::Identity();
  int k = 0;
  S.diagonal().maxCoeff(&k);
  Vec3 axis = S.col(k) / std::sqrt(std::max(S(k, k), 1e-300));
  axis.normalize();
  if (axis.dot(v) < 0.0) axis = -axis;
  return theta * axis;
}

Mat3 orthonormalize(const Mat3& R) {
  Eigen::JacobiSVD<Mat3> svd(R, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 U = svd.matrixU();
  const Mat3 V = svd.matrixV();
  if ((U * V.transpose()).determinant() < 0.0) U.col(2) = -U.col(2);
  return U * V.transpose();
}

Vec3 any_orthogonal(const Vec3& v) {
  int k = 0;
  v.cwiseAbs().minCoeff(&k);
  Vec3 e = Vec3::Zero();
  e[k] = 1.0;
  return (e - e.dot(v) * v).normalized();
}

Mat3 rotation_between(const Vec3& from, const Vec3& to) {
  const Vec3 a = from.normalized();
  const Vec3 b = to.normalized();
  const Vec3 c = a.cross(b);
  const double s = c.norm();
  const double cosang = a.dot(b);
  if (s < 1e-15) {
    if (cosang > 0.0) return Mat3::Identity();
    return exp_so3(std::numbers::pi * any_orthogonal(a));
  }
  return exp_so3(std::atan2(s, cosang) * (c / s));
}

Ray::Ray(const Vec3& o, const Vec3& d) : origin(o) {
  const double n = d.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw Error(ErrorCode::InvalidInput, "ray direction must be nonzero");
  }
  direction = d / n;
}

bool Aabb::intersects(const Ray& ray, double t_min, double t_max) const {
  for (int i = 0; i < 3; ++i) {
    const double inv = 1.0 / ray.direction[i];
    double t0 = (min[i] - ray.origin[i]) * inv;
    double t1 = (max[i] - ray.origin[i]) * inv;
    if (inv < 0.0) std::swap(t0, t1);
    // NaN (0 * inf) means the ray runs inside the slab plane; keep the range.
    if (t0 == t0) t_min = std::max(t_min, t0);
    if (t1 == t1) t_max = std::min(t_max, t1);
    if (t_max < t_min) return false;
  }
  return true;
}

}  // namespace regrasp
