#include "regrasp/triplet_selector.hpp"

#include <algorithm>
#include <cmath>

#include "regrasp/error.hpp"

namespace regrasp {

Vec3 canonical_axis(const Vec3& axis) {
  // Adding +0.0 turns -0.0 entries into +0.0 so written axes read cleanly.
  const Vec3 a = axis.normalized();
  for (int i = 0; i < 3; ++i) {
    if (a[i] != 0.0) return (a[i] > 0.0 ? a : Vec3(-a)) + Vec3::Zero();
  }
  return a + Vec3::Zero();
}

std::vector<GraspGroup> group_by_axis(std::span<const GraspCandidate> candidates,
                                      double group_tol) {
  if (candidates.empty()) throw Error(ErrorCode::InvalidInput, "no candidates to group");
  std::vector<GraspGroup> groups;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const Vec3& v = candidates[i].closing_axis;
    auto it = std::find_if(groups.begin(), groups.end(), [&](const GraspGroup& g) {
      return std::abs(g.axis.dot(v)) > 1.0 - group_tol;
    });
    if (it == groups.end()) {
      groups.push_back({canonical_axis(v), {}});
      it = std::prev(groups.end());
    }
    it->members.push_back(static_cast<int>(i));
  }
  return groups;
}

double score_triplet(const Vec3& vi, const Vec3& vj, const Vec3& vk) {
  return std::abs(vi.dot(vj)) + std::abs(vi.dot(vk)) + std::abs(vj.dot(vk));
}

std::vector<Triplet> enumerate_triplets(std::span<const GraspGroup> groups,
                                        double singularity_tol) {
  const int n = static_cast<int>(groups.size());
  std::vector<Triplet> out;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      for (int k = j + 1; k < n; ++k) {
        const Vec3& a = groups[static_cast<std::size_t>(i)].axis;
        const Vec3& b = groups[static_cast<std::size_t>(j)].axis;
        const Vec3& c = groups[static_cast<std::size_t>(k)].axis;
        Mat3 m;
        m << a, b, c;
        const double det = std::abs(m.determinant());
        if (det <= singularity_tol) continue;
        out.push_back({{i, j, k}, score_triplet(a, b, c), det});
      }
    }
  }
  if (out.empty()) {
    throw Error(ErrorCode::NoValidTriplet,
                "no non-singular triplet among " + std::to_string(n) + " groups");
  }
  // Generated in lexicographic order, so a stable sort keeps ties that way.
  std::stable_sort(out.begin(), out.end(),
                   [](const Triplet& x, const Triplet& y) { return x.score < y.score; });
  return out;
}

}  // namespace regrasp
