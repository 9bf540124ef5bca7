#include <benchmark/benchmark.h>

#include <random>

#include "regrasp/grasp_planner.hpp"
#include "regrasp/mesh.hpp"
#include "regrasp/shapes.hpp"

using namespace regrasp;

namespace {

std::vector<Ray> random_rays(std::size_t n) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  std::vector<Ray> rays;
  for (std::size_t i = 0; i < n; ++i) {
    rays.emplace_back(Vec3(0.01 * g(rng), 0.01 * g(rng), 0.01 * g(rng)),
                      Vec3(g(rng), g(rng), g(rng)).normalized());
  }
  return rays;
}

void BM_RayMesh(benchmark::State& state) {
  const TriMesh mesh = shapes::icosphere(0.02, static_cast<int>(state.range(0)));
  const auto rays = random_rays(1024);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ray_mesh_intersect(rays[i++ & 1023], mesh));
  }
  state.counters["triangles"] = static_cast<double>(mesh.num_faces());
}
BENCHMARK(BM_RayMesh)->Arg(1)->Arg(3)->Arg(5);

void BM_GripperCollision(benchmark::State& state) {
  const TriMesh mesh = shapes::builtin("l-square");
  const GripperModel g;
  const Pose pose(exp_so3({0.2, 0.1, -0.3}), Vec3(0.0, 0.0, 0.01));
  for (auto _ : state) {
    benchmark::DoNotOptimize(check_gripper_collision(pose, 0.025, g, mesh));
  }
}
BENCHMARK(BM_GripperCollision);

}  // namespace
