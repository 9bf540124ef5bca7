#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "regrasp/error.hpp"
#include "regrasp/grasp_planner.hpp"
#include "regrasp/shapes.hpp"
#include "regrasp/triplet_selector.hpp"

using namespace regrasp;

namespace {

// Pair found by shooting at the mesh from outside along -dir and then
// through the solid from the entry point.
ContactPair pair_from_outside(const TriMesh& mesh, const Vec3& target, const Vec3& dir) {
  const auto entry = ray_mesh_intersect(Ray(target + dir, -dir), mesh, 0.0);
  EXPECT_TRUE(entry);
  const auto exit = ray_mesh_intersect(Ray(entry->point, -entry->normal), mesh);
  EXPECT_TRUE(exit);
  ContactPair p;
  p.point_a = entry->point;
  p.normal_a = entry->normal;
  p.point_b = exit->point;
  p.normal_b = exit->normal;
  p.width = (p.point_b - p.point_a).norm();
  p.face_a = entry->face;
  p.face_b = exit->face;
  return p;
}

bool same_candidates(const std::vector<GraspCandidate>& a, const std::vector<GraspCandidate>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a[i].pose == b[i].pose) || a[i].width != b[i].width || a[i].pair_index != b[i].pair_index) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST(AntipodalPairs, CubePairsLieOnOppositeFaces) {
  const GripperModel g;
  const TriMesh cube = shapes::cube(0.025);
  const auto pairs = sample_antipodal_pairs(cube, 50, 0.01, g, 3);
  ASSERT_FALSE(pairs.empty());
  for (const ContactPair& p : pairs) {
    EXPECT_LT(p.normal_a.dot(p.normal_b), -0.99);
    EXPECT_NEAR(p.width, 0.025, 1e-12);
    // Both contacts sit on faces whose normals are coordinate axes.
    EXPECT_NEAR(p.normal_a.cwiseAbs().maxCoeff(), 1.0, 1e-12);
    EXPECT_NEAR((p.point_b - p.point_a).normalized().dot(-p.normal_a), 1.0, 1e-12);
  }
}

TEST(AntipodalPairs, SpherePairsAreNearlyDiametral) {
  const GripperModel g;
  const double r = 0.02;
  const TriMesh sphere = shapes::icosphere(r, 3);
  // A sample anywhere on facet f shoots along -n_f, so the chord misses the
  // center by at most the facet's reach around its foot point h*n_f; the
  // flat facets shift each chord end by at most the chord error.
  double chord_error = 0.0, reach = 0.0;
  for (std::size_t f = 0; f < sphere.num_faces(); ++f) {
    const Vec3& n = sphere.normal(f);
    const auto t = sphere.triangle(f);
    const double h = n.dot(t[0]);
    chord_error = std::max(chord_error, r - h);
    for (const Vec3& v : t) reach = std::max(reach, (v - h * n).norm());
  }
  const auto pairs = sample_antipodal_pairs(sphere, 400, 0.01, g, 5);
  ASSERT_FALSE(pairs.empty());
  for (const ContactPair& p : pairs) {
    const Vec3 mid = 0.5 * (p.point_a + p.point_b);
    EXPECT_LT(mid.norm(), reach + 2.0 * chord_error) << mid.transpose();
    EXPECT_LT(p.normal_a.dot(p.normal_b), -0.99);
  }
}

TEST(AntipodalPairs, LShapeWidthsMatchCrossSection) {
  const GripperModel g;
  const auto pairs = sample_antipodal_pairs(shapes::l_square(), 300, 0.01, g, 1);
  ASSERT_FALSE(pairs.empty());
  for (const ContactPair& p : pairs) EXPECT_NEAR(p.width, 0.025, 1e-12);
}

TEST(AntipodalPairs, TooLargeObjectFindsNothing) {
  GripperModel g;
  try {
    (void)sample_antipodal_pairs(shapes::cube(0.08), 100, 0.01, g, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoPairsFound);
  }
}

TEST(AntipodalPairs, RejectsBadCount) {
  EXPECT_THROW((void)sample_antipodal_pairs(shapes::cube(0.025), 0, 0.01, GripperModel{}, 0), Error);
}

TEST(ExpandPair, CubeYPairKeepsAxis) {
  const GripperModel g;
  const TriMesh cube = shapes::cube(0.025);
  const ContactPair p = pair_from_outside(cube, {0.003, 0.0, -0.002}, {0, 1, 0});
  const auto grasps = expand_pair_to_grasps(p, cube, g, 8);
  ASSERT_FALSE(grasps.empty());
  EXPECT_LE(grasps.size(), 8u);
  const Vec3 mid = 0.5 * (p.point_a + p.point_b);
  for (const GraspCandidate& c : grasps) {
    EXPECT_NEAR(std::abs(c.closing_axis.y()), 1.0, 1e-12);
    EXPECT_EQ(c.closing_axis, c.pose.R.col(1));
    EXPECT_LT((c.pose.p - mid).norm(), 1e-15);
    EXPECT_TRUE(is_valid_rotation(c.pose.R));
  }
}

TEST(ExpandPair, SpinAnglesAreUniform) {
  const TriMesh cube = shapes::cube(0.025);
  const ContactPair p = pair_from_outside(cube, Vec3::Zero(), {1, 0, 0});
  const Pose f0 = grasp_frame_for_pair(p, 0.0);
  for (int k = 0; k < 8; ++k) {
    const double angle = 2.0 * M_PI * k / 8;
    const Pose fk = grasp_frame_for_pair(p, angle);
    EXPECT_LT((fk.R.col(1) - f0.R.col(1)).norm(), 1e-15);
    EXPECT_NEAR(rotation_angle(f0.R.transpose() * fk.R), std::min(angle, 2 * M_PI - angle), 1e-12);
  }
}

TEST(ExpandPair, BlockedWhenPalmAlwaysPenetrates) {
  // A wide thin plate gripped through its thickness: every approach
  // direction in the plate plane drives the palm into the material.
  const GripperModel g;
  const TriMesh plate = shapes::box(0.4, 0.010, 0.4);
  const ContactPair p = pair_from_outside(plate, Vec3::Zero(), {0, 1, 0});
  EXPECT_TRUE(expand_pair_to_grasps(p, plate, g, 16).empty());
}

TEST(GripperCollision, TrivialConfigurations) {
  const GripperModel g;
  const TriMesh cube = shapes::cube(0.025);
  EXPECT_FALSE(check_gripper_collision(Pose::from_translation({1, 0, 0}), 0.025, g, cube));
  // Palm center placed at the object center.
  const Pose palm_inside = Pose::from_translation({0, 0, g.finger_depth + g.palm_size.z() / 2});
  EXPECT_TRUE(check_gripper_collision(palm_inside, 0.025, g, cube));
}

TEST(GripperCollision, ValidFacePairIsFree) {
  const GripperModel g;
  const TriMesh cube = shapes::cube(0.025);
  const ContactPair p = pair_from_outside(cube, Vec3::Zero(), {0, 1, 0});
  const Pose pose = grasp_frame_for_pair(p, 0.0);
  EXPECT_FALSE(check_gripper_collision(pose, p.width, g, cube));
  // Oracle: no body box overlaps any cube triangle.
  for (const OrientedBox& b : gripper_boxes_world(g, pose, p.width, kPadClearance)) {
    for (std::size_t f = 0; f < cube.num_faces(); ++f) {
      const auto t = cube.triangle(f);
      EXPECT_FALSE(oracle::box_triangle_overlap(b, t[0], t[1], t[2]));
    }
  }
  // Closing narrower than the object drives the fingers into it.
  EXPECT_TRUE(check_gripper_collision(pose, p.width - 0.002, g, cube));
}

TEST(PlanGrasps, FiveLContactsFormThreeAxisClasses) {
  const GripperModel g;
  const TriMesh l = shapes::l_square();
  const Aabb b = l.bounds();
  // Long arm along x at low y, short arm along y at low x.
  const double arm = 0.0125;
  const Vec3 long_mid(b.center().x() + 0.02, b.min.y() + arm, 0.0);
  const Vec3 short_mid(b.min.x() + arm, b.center().y() + 0.02, 0.0);
  const std::vector<ContactPair> pairs = {
      pair_from_outside(l, long_mid, {0, 0, 1}),
      pair_from_outside(l, long_mid, {0, -1, 0}),
      pair_from_outside(l, short_mid, {1, 0, 0}),
      pair_from_outside(l, short_mid, {0, 0, -1}),
      pair_from_outside(l, long_mid + Vec3(0.03, 0, 0), {0, 1, 0}),
  };
  std::vector<GraspCandidate> candidates;
  for (const ContactPair& p : pairs) {
    EXPECT_NEAR(p.width, 0.025, 1e-12);
    for (GraspCandidate c : expand_pair_to_grasps(p, l, g, 8)) candidates.push_back(c);
  }
  ASSERT_FALSE(candidates.empty());
  const auto groups = group_by_axis(candidates);
  ASSERT_EQ(groups.size(), 3u);
  EXPECT_NEAR(score_triplet(groups[0].axis, groups[1].axis, groups[2].axis), 0.0, 1e-12);
}

TEST(PlanGrasps, FrameConventionHolds) {
  const GripperModel g;
  const TriMesh mesh = shapes::l_diamond();
  const GraspPlan plan = plan_grasps(mesh, g, {200, 8, 0.01, 4});
  ASSERT_FALSE(plan.candidates.empty());
  for (const GraspCandidate& c : plan.candidates) {
    const ContactPair& p = plan.pairs.at(static_cast<std::size_t>(c.pair_index));
    const Vec3 axis = (p.point_b - p.point_a) / p.width;
    EXPECT_NEAR(std::abs(c.pose.R.col(1).dot(axis)), 1.0, 1e-6);
    EXPECT_EQ(c.closing_axis, c.pose.R.col(1));
    EXPECT_GT(c.width, 0.0);
    EXPECT_LE(c.width, g.max_opening);
    EXPECT_FALSE(check_gripper_collision(c.pose, c.width, g, mesh));
  }
}

TEST(PlanGrasps, DeterministicForSeed) {
  const GripperModel g;
  const TriMesh mesh = shapes::l_square();
  const auto a = plan_grasps(mesh, g, {150, 8, 0.01, 42});
  const auto b = plan_grasps(mesh, g, {150, 8, 0.01, 42});
  EXPECT_TRUE(same_candidates(a.candidates, b.candidates));
  const auto c = plan_grasps(mesh, g, {150, 8, 0.01, 43});
  EXPECT_FALSE(same_candidates(a.candidates, c.candidates));
}

TEST(PlanGrasps, MoreSamplesKeepEarlierGrasps) {
  const GripperModel g;
  const TriMesh mesh = shapes::l_diamond();
  const auto small = plan_grasps(mesh, g, {100, 8, 0.01, 9});
  const auto large = plan_grasps(mesh, g, {200, 8, 0.01, 9});
  ASSERT_LE(small.candidates.size(), large.candidates.size());
  for (std::size_t i = 0; i < small.candidates.size(); ++i) {
    EXPECT_TRUE(small.candidates[i].pose == large.candidates[i].pose) << i;
  }
  for (std::size_t i = 0; i < small.pairs.size(); ++i) {
    EXPECT_EQ(small.pairs[i].sample_index, large.pairs[i].sample_index);
  }
}
