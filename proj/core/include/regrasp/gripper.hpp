#pragma once

#include <vector>

#include "regrasp/collision.hpp"
#include "regrasp/geometry.hpp"

namespace regrasp {

// Parallel-jaw gripper. Gripper frame: x = pad lateral axis, y = closing
// axis, z = approach axis pointing from the palm toward the contact center.
// The origin is the midpoint between the two pad centers.
struct GripperModel {
  double max_opening = 0.050;
  double pad_width = 0.014;       // along x
  double pad_height = 0.014;      // along z
  double finger_depth = 0.035;    // pad center to palm face along -z
  double finger_thickness = 0.008;
  Vec3 palm_size{0.030, 0.066, 0.020};

  // Throws InvalidInput unless every extent is positive.
  void validate() const;

  // Finger boxes (A at -y, B at +y) opened to `width` plus the palm box, in
  // the gripper frame. `pad_clearance` pulls the inner finger faces outward
  // so that pads resting on contact faces do not register as collisions.
  std::vector<OrientedBox> body_boxes(double width, double pad_clearance = 0.0) const;

  // Pad contact sample points in the gripper frame: `per_side` x `per_side`
  // cell centers on each pad face. Pad A first.
  std::vector<Vec3> pad_samples(double width, int per_side, int pad) const;
};

inline constexpr double kPadClearance = 1e-5;

std::vector<OrientedBox> gripper_boxes_world(const GripperModel& gripper, const Pose& pose,
                                             double width, double pad_clearance = 0.0);

}  // namespace regrasp
