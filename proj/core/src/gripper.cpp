#include "regrasp/gripper.hpp"

#include "regrasp/error.hpp"

namespace regrasp {

void GripperModel::validate() const {
  if (!(max_opening > 0.0 && pad_width > 0.0 && pad_height > 0.0 && finger_depth > 0.0 &&
        finger_thickness > 0.0 && (palm_size.array() > 0.0).all())) {
    throw Error(ErrorCode::InvalidInput, "gripper extents must be positive");
  }
  if (finger_depth < pad_height / 2.0) {
    throw Error(ErrorCode::InvalidInput, "finger_depth must reach past the pad");
  }
}

std::vector<OrientedBox> GripperModel::body_boxes(double width, double pad_clearance) const {
  const double inner = width / 2.0 + pad_clearance;
  const double z_lo = -finger_depth;
  const double z_hi = pad_height / 2.0;
  const Vec3 finger_half(pad_width / 2.0, finger_thickness / 2.0, (z_hi - z_lo) / 2.0);
  const double zc = (z_hi + z_lo) / 2.0;
  const double yc = inner + finger_thickness / 2.0;
  return {
      {Pose::from_translation({0.0, -yc, zc}), finger_half},
      {Pose::from_translation({0.0, yc, zc}), finger_half},
      {Pose::from_translation({0.0, 0.0, z_lo - palm_size.z() / 2.0}), palm_size / 2.0},
  };
}

std::vector<Vec3> GripperModel::pad_samples(double width, int per_side, int pad) const {
  std::vector<Vec3> out;
  out.reserve(static_cast<std::size_t>(per_side * per_side));
  const double y = pad == 0 ? -width / 2.0 : width / 2.0;
  for (int i = 0; i < per_side; ++i) {
    const double x = pad_width * ((i + 0.5) / per_side - 0.5);
    for (int j = 0; j < per_side; ++j) {
      const double z = pad_height * ((j + 0.5) / per_side - 0.5);
      out.emplace_back(x, y, z);
    }
  }
  return out;
}

std::vector<OrientedBox> gripper_boxes_world(const GripperModel& gripper, const Pose& pose,
                                             double width, double pad_clearance) {
  auto boxes = gripper.body_boxes(width, pad_clearance);
  for (OrientedBox& b : boxes) b = b.transformed(pose);
  return boxes;
}

}  // namespace regrasp
