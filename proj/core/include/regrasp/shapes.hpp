#pragma once

#include <string>
#include <vector>

#include "regrasp/mesh.hpp"

namespace regrasp::shapes {

// All generated solids are centered on their bounding-box center and wound
// outward.

TriMesh box(double size_x, double size_y, double size_z);
inline TriMesh cube(double side) { return box(side, side, side); }

// Rhombus cross-section: `acute_deg` interior angle, `thickness` between the
// parallel sides. One pair of sides is normal to z, the other is slanted.
std::vector<Eigen::Vector2d> rhombus_profile(double thickness, double acute_deg);
std::vector<Eigen::Vector2d> square_profile(double side);

// Straight prism of a convex (u, z) profile extruded along x.
TriMesh prism(const std::vector<Eigen::Vector2d>& profile, double length);

// L-shaped bar: a convex (u, z) profile swept along an arm of `long_arm` on x
// and `short_arm` on y, mitered at the corner.
TriMesh l_shape(const std::vector<Eigen::Vector2d>& profile, double long_arm, double short_arm);

// Standard test objects (meters): 125 mm / 100 mm arms, 25 mm across flats.
TriMesh l_square();
TriMesh l_diamond();
// Straight prism with the 75 degree rhombus section, short enough along its
// axis to be grasped end to end.
TriMesh diamond_prism(double length = 0.040);

TriMesh icosphere(double radius, int subdivisions);

// Names accepted by builtin(): l-square, l-diamond, diamond-prism, cube25,
// sphere40.
std::vector<std::string> builtin_names();
TriMesh builtin(const std::string& name);

}  // namespace regrasp::shapes
