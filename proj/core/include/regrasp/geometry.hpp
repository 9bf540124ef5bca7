#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <limits>

namespace regrasp {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Rigid transform. Columns of R are the frame axes expressed in the parent
// frame; p is the frame origin in the parent frame (meters).
struct Pose {
  Mat3 R = Mat3::Identity();
  Vec3 p = Vec3::Zero();

  Pose() = default;
  Pose(const Mat3& rotation, const Vec3& translation) : R(rotation), p(translation) {}

  static Pose identity() { return {}; }
  static Pose from_translation(const Vec3& t) { return {Mat3::Identity(), t}; }
  static Pose from_rotation(const Mat3& r) { return {r, Vec3::Zero()}; }

  Vec3 transform_point(const Vec3& x) const { return R * x + p; }
  Vec3 transform_vector(const Vec3& v) const { return R * v; }
  Vec3 axis(int column) const { return R.col(column); }

  bool operator==(const Pose& other) const { return R == other.R && p == other.p; }
};

// a * b: the frame b (expressed in a) mapped into a's parent.
Pose compose(const Pose& a, const Pose& b);
Pose invert(const Pose& a);
// Pose of b expressed in the frame of a, i.e. compose(invert(a), b).
Pose relative(const Pose& a, const Pose& b);

inline Pose operator*(const Pose& a, const Pose& b) { return compose(a, b); }

// True when R is orthonormal with det +1 within tol.
bool is_valid_rotation(const Mat3& R, double tol = 1e-9);
bool is_valid_pose(const Pose& pose, double tol = 1e-9);

Mat3 hat(const Vec3& w);
Vec3 vee(const Mat3& skew);

// Rodrigues exponential of the rotation vector w (radians * unit axis).
Mat3 exp_so3(const Vec3& w);

// Inverse of exp_so3 for rotation angles below pi. Throws AngleNearPi when
// trace(R) <= -1 + 1e-9.
Vec3 log_so3(const Mat3& R);

// Rotation angle of R in [0, pi], stable across the whole range.
double rotation_angle(const Mat3& R);

// Re-orthonormalizes a nearly orthonormal matrix (closest rotation via SVD).
Mat3 orthonormalize(const Mat3& R);

// Smallest rotation taking unit vector `from` onto unit vector `to`.
Mat3 rotation_between(const Vec3& from, const Vec3& to);

// Any unit vector orthogonal to v, chosen deterministically.
Vec3 any_orthogonal(const Vec3& v);

struct Ray {
  Vec3 origin = Vec3::Zero();
  Vec3 direction = Vec3::UnitZ();

  Ray() = default;
  // Normalizes the direction; throws InvalidInput for a zero direction.
  Ray(const Vec3& o, const Vec3& d);
  Vec3 at(double t) const { return origin + t * direction; }
};

struct Aabb {
  Vec3 min = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 max = Vec3::Constant(-std::numeric_limits<double>::infinity());

  Aabb() = default;
  Aabb(const Vec3& lo, const Vec3& hi) : min(lo), max(hi) {}

  void extend(const Vec3& x) {
    min = min.cwiseMin(x);
    max = max.cwiseMax(x);
  }
  void extend(const Aabb& o) {
    min = min.cwiseMin(o.min);
    max = max.cwiseMax(o.max);
  }
  bool empty() const { return (min.array() > max.array()).any(); }
  bool contains(const Vec3& x) const {
    return (x.array() >= min.array()).all() && (x.array() <= max.array()).all();
  }
  bool overlaps(const Aabb& o) const {
    return (min.array() <= o.max.array()).all() && (o.min.array() <= max.array()).all();
  }
  Vec3 center() const { return 0.5 * (min + max); }
  Vec3 extent() const { return max - min; }

  // Slab test; returns the entry distance when the ray meets the box within
  // [t_min, t_max].
  bool intersects(const Ray& ray, double t_min, double t_max) const;
};

}  // namespace regrasp
