#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "regrasp/grasp_planner.hpp"

namespace regrasp {

// Candidates sharing an undirected closing axis.
struct GraspGroup {
  Vec3 axis;                 // canonical: first nonzero component positive
  std::vector<int> members;  // candidate indices, ascending
};

struct Triplet {
  std::array<int, 3> groups{};  // indices into the group list, ascending
  double score = 0.0;
  double determinant = 0.0;  // |det[v_i v_j v_k]|
};

// Grouping tolerance: two axes match when |dot| > 1 - group_tol. The default
// corresponds to 2 degrees.
inline const double kDefaultGroupTol = 1.0 - std::cos(2.0 * std::numbers::pi / 180.0);
inline constexpr double kDefaultSingularityTol = 0.05;

Vec3 canonical_axis(const Vec3& axis);

// Greedy: each candidate joins the first group whose axis matches.
std::vector<GraspGroup> group_by_axis(std::span<const GraspCandidate> candidates,
                                      double group_tol = kDefaultGroupTol);

// |vi.vj| + |vi.vk| + |vj.vk|; 0 for an orthonormal set, 3 for parallel axes.
double score_triplet(const Vec3& vi, const Vec3& vj, const Vec3& vk);

// All non-singular 3-combinations, ascending by score, ties by index order.
// Throws NoValidTriplet when none survive.
std::vector<Triplet> enumerate_triplets(std::span<const GraspGroup> groups,
                                        double singularity_tol = kDefaultSingularityTol);

}  // namespace regrasp
