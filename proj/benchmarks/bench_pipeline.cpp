#include <benchmark/benchmark.h>

#include "regrasp/conformance.hpp"
#include "regrasp/grasp_planner.hpp"
#include "regrasp/pose_estimator.hpp"
#include "regrasp/shapes.hpp"
#include "regrasp/triplet_selector.hpp"

using namespace regrasp;

namespace {

void BM_PlanGrasps(benchmark::State& state) {
  const TriMesh mesh = shapes::builtin("l-square");
  PlannerParams p;
  p.n_points = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(plan_grasps(mesh, GripperModel{}, p));
}
BENCHMARK(BM_PlanGrasps)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_Triplets(benchmark::State& state) {
  const GraspPlan plan = plan_grasps(shapes::builtin("diamond-prism"), GripperModel{}, {});
  for (auto _ : state) {
    benchmark::DoNotOptimize(enumerate_triplets(group_by_axis(plan.candidates)));
  }
}
BENCHMARK(BM_Triplets);

// Hand 3 mm off center and tilted 2 degrees, default tolerances.
void BM_Conform(benchmark::State& state) {
  const TriMesh cube = shapes::cube(0.025);
  const Pose planned(exp_so3({0.035, 0.0, 0.0}), Vec3(0.0, 0.003, 0.0));
  int steps = 0;
  for (auto _ : state) {
    const auto r = conform_grasp(planned, 0.023, Pose(), cube, GripperModel{}, ContactModel{},
                                 AdmittanceParams{}, ConformanceOptions{});
    steps = r.steps_used;
    benchmark::DoNotOptimize(r);
  }
  state.counters["steps"] = steps;
}
BENCHMARK(BM_Conform)->Unit(benchmark::kMicrosecond);

void BM_Estimate(benchmark::State& state) {
  const Pose sim(exp_so3({0.1, 0.2, 0.3}), Vec3(0.0, 0.0, 0.3));
  auto grasp = [&](const Vec3& rv, const Vec3& p) { return sim * Pose(exp_so3(rv), p); };
  const Pose a = grasp({0, 0, 0}, {0, 0, 0});
  const Pose b = grasp({0, 0, 1.5707963267948966}, {0.01, 0, 0});
  const Pose c = grasp({1.5707963267948966, 0, 0}, {0, 0, 0.01});
  const Pose turn(exp_so3(0.02 * a.R.col(1)), Vec3::Zero());
  const GraspRecord g1{a, a, GraspRole::G1};
  const GraspRecord g2{b, turn * b, GraspRole::G2};
  const GraspRecord g3{c, turn * c, GraspRole::G3};
  for (auto _ : state) benchmark::DoNotOptimize(estimate_pose(g1, g2, g3, sim));
}
BENCHMARK(BM_Estimate);

}  // namespace
