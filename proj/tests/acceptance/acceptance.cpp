// Exit gate: one PASS/FAIL line per acceptance criterion. Exits nonzero when
// any criterion fails.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "regrasp/error.hpp"
#include "regrasp/serialization.hpp"

namespace fs = std::filesystem;
using namespace regrasp;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

int failures = 0;

void report(int n, const std::string& title, const std::function<Outcome()>& body) {
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  if (!o.pass) ++failures;
  std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", n, title.c_str(), o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

struct Triple {
  TriMesh mesh;
  GraspPlan grasps;
  std::vector<GraspGroup> groups;
  std::vector<Triplet> triplets;
};

Triple plan_for(const std::string& name) {
  Triple t;
  t.mesh = shapes::builtin(name);
  t.grasps = plan_grasps(t.mesh, GripperModel{}, {});
  t.groups = group_by_axis(t.grasps.candidates);
  t.triplets = enumerate_triplets(t.groups);
  return t;
}

// Undirected face-normal axes of a mesh.
std::vector<Vec3> face_axes(const TriMesh& mesh) {
  std::vector<Vec3> out;
  for (const Vec3& n : mesh.normals()) {
    bool seen = false;
    for (const Vec3& m : out) seen = seen || std::abs(std::abs(n.dot(m)) - 1.0) < 1e-9;
    if (!seen) out.push_back(n);
  }
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// ------------------------------------------------------------------ criteria

Outcome exact_recovery() {
  Outcome o;
  double worst_p = 0.0, worst_r = 0.0;
  std::size_t trials = 0;
  for (const char* mesh : {"builtin:l-square", "builtin:diamond-prism"}) {
    TrialConfig c = fixture::experiment(mesh);
    c.ranges = {5.0 * kDeg, 0.010};
    c.n_repeats = 334;  // 3 placements -> 1002 trials per mesh
    c.seed = 2024;
    const TrialReport r = run_experiment(c);
    for (const TrialRow& row : r.rows) {
      worst_p = std::max(worst_p, row.object_dp_mm.norm() * 1e-3);
      worst_r = std::max(worst_r, row.object_dw_deg.norm() * kDeg);
    }
    trials += r.rows.size();
  }
  o.require(trials >= 2000, "too few trials");
  o.require(worst_p < 1e-6, fmt("position error %.3g m", worst_p));
  o.require(worst_r < 1e-6, fmt("rotation error %.3g rad", worst_r));
  o.detail = fmt("%.0f trials on L-square and diamond prism, worst %.2e m / %.2e rad", static_cast<double>(trials),
                 worst_p, worst_r) + (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

Outcome orthogonality_score() {
  Outcome o;
  const Triple l = plan_for("l-square");
  const Triple d = plan_for("diamond-prism");
  const auto axes = face_axes(d.mesh);
  const double oracle_score = axes.size() == 3
                                  ? std::abs(axes[0].dot(axes[1])) + std::abs(axes[0].dot(axes[2])) +
                                        std::abs(axes[1].dot(axes[2]))
                                  : -1.0;
  const double expected = std::abs(std::cos(105.0 * kDeg));
  o.require(l.groups.size() == 3, "L-square groups = " + std::to_string(l.groups.size()));
  o.require(l.triplets.front().score < 1e-9, fmt("L-square best score %.3g", l.triplets.front().score));
  o.require(std::abs(d.triplets.front().score - expected) <= 1e-4,
            fmt("diamond best score %.6f vs %.6f", d.triplets.front().score, expected));
  o.require(std::abs(d.triplets.front().score - oracle_score) <= 1e-4,
            fmt("diamond best score %.6f vs face-normal oracle %.6f", d.triplets.front().score, oracle_score));
  o.detail = fmt("L-square: 3 groups, best %.2e; diamond best %.6f (face-normal oracle %.6f)",
                 l.triplets.front().score, d.triplets.front().score, oracle_score) +
             (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

Outcome admittance() {
  Outcome o;
  const AdmittanceParams p;
  MotionState measured, desired;
  const Wrench step{Vec3(1.0, 0, 0), Vec3::Zero()};
  const double k = p.K(0, 0), omega = std::sqrt(k / p.M(0, 0));
  double worst = 0.0;
  for (int i = 1; i <= 1000; ++i) {
    desired = admittance_step(measured, desired, step, p);
    const double t = i * p.dt;
    const double exact = (1.0 / k) * (1.0 - (1.0 + omega * t) * std::exp(-omega * t));
    worst = std::max(worst, std::abs((measured.pose.p.x() - desired.pose.p.x()) - exact));
  }
  const double rel = worst * k;
  o.require(rel <= 0.01, fmt("step response deviation %.3g of final value", rel));

  AdmittanceParams q;
  q.K = Vec3(300, 400, 500).asDiagonal();
  MotionState m2;
  m2.pose.p = Vec3(0.01, -0.02, 0.03);
  MotionState d2 = m2;
  const Wrench f{Vec3(1.0, -2.0, 0.5), Vec3::Zero()};
  for (int i = 0; i < 20000; ++i) d2 = admittance_step(m2, d2, f, q, false);
  const double residual = (q.K * (m2.pose.p - d2.pose.p) - f.force).norm();
  o.require(residual <= 1e-6, fmt("static residual %.3g N", residual));
  o.detail = fmt("step response within %.3f%% of closed form; static residual %.2e N", 100 * rel, residual) +
             (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

Outcome conformance_geometry() {
  Outcome o;
  const TriMesh cube = shapes::cube(0.025);
  const GripperModel g;
  const ContactModel contact;
  const AdmittanceParams params;
  const ConformanceOptions options;  // 1e-3 N, 1e-4 N m, 20000 steps
  const Pose planned(exp_so3({0.3, -0.2, 0.5}), Vec3(0.1, 0.0, 0.3));
  double worst = 0.0;
  int max_steps = 0;
  for (double mm : {-10.0, -7.5, -5.0, -2.0, -0.5, 0.0, 0.5, 2.0, 5.0, 7.5, 10.0}) {
    const Pose object = planned * Pose::from_translation({0.0, mm * 1e-3, 0.0});
    const Pose before = object;
    const auto r = conform_grasp(planned, 0.023, object, cube, g, contact, params, options);
    o.require(object == before, "object pose changed");
    o.require(r.converged && r.residual_force.norm() < 1e-3, fmt("offset %.1f mm did not converge", mm));
    // Pad midplane passes through the gripper origin; the face midplane
    // through the cube center.
    const double gap = r.conformed_pose.R.col(1).dot(r.conformed_pose.p - object.p);
    worst = std::max(worst, std::abs(gap));
    max_steps = std::max(max_steps, r.steps_used);
  }
  o.require(worst <= 1e-5, fmt("midplane mismatch %.3g m", worst));
  o.detail = fmt("offsets up to 10 mm: worst midplane mismatch %.2e m, at most %.0f steps, object untouched", worst,
                 max_steps) + (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

Outcome noise_repeatability() {
  Outcome o;
  TrialConfig c = fixture::experiment("builtin:l-square");
  c.noise = {0.0001, 0.05 * kDeg};
  c.n_repeats = 100;
  const TrialReport r = run_experiment(c);
  double dp = 0.0, dw = 0.0;
  for (const auto& p : r.placements) {
    dp = std::max(dp, p.object.dp_mm.std.maxCoeff());
    dw = std::max(dw, p.object.dw_deg.std.maxCoeff());
  }
  dp = std::max(dp, r.object.dp_mm.std.maxCoeff());
  dw = std::max(dw, r.object.dw_deg.std.maxCoeff());
  o.require(r.rows.size() == 300, "expected 300 trials");
  o.require(dp <= 0.5, fmt("dp std %.3g mm", dp));
  o.require(dw <= 1.0, fmt("dw std %.3g deg", dw));
  o.detail = fmt("300 trials, largest per-axis std %.3f mm / %.3f deg", dp, dw) +
             (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

Outcome orthogonality_insensitivity() {
  Outcome o;
  const Triple l = plan_for("l-square");
  const Triple d = plan_for("diamond-prism");
  const RegraspScene scene = fixture::table_scene();
  const RegraspPlan pl = plan_sequence(l.triplets, l.groups, l.grasps.candidates, scene, GripperModel{}, l.mesh);
  // The diamond's best triplet, one member per group.
  const Triplet& td = d.triplets.front();
  std::array<Pose, 3> gd, gl;
  for (std::size_t k = 0; k < 3; ++k) {
    gl[k] = l.grasps.candidates[static_cast<std::size_t>(pl.grasps[k])].pose;
    gd[k] = d.grasps.candidates[static_cast<std::size_t>(
                                    d.groups[static_cast<std::size_t>(td.groups[k])].members.front())]
                .pose;
  }
  // Carry the diamond grasp set rigidly so that its first grasp coincides
  // with the L-square's: both scenes then share one injected truth.
  const Pose align = gl[0] * invert(gd[0]);
  for (Pose& p : gd) p = align * p;
  const Pose sim = scene.handover;
  const auto a = oracle::make_scene(sim, gl, 3.0 * kDeg, 0.004, -0.006);
  const auto b = oracle::make_scene(sim, gd, 3.0 * kDeg, 0.004, -0.006);
  o.require((a.true_object.p - b.true_object.p).norm() == 0.0 && a.true_object.R == b.true_object.R,
            "scenes differ in truth");
  const auto ea = estimate_pose(a.g1, a.g2, a.g3, sim);
  const auto eb = estimate_pose(b.g1, b.g2, b.g3, sim);
  const double dp = (ea.object_pose.p - eb.object_pose.p).norm();
  const double dr = rotation_angle(ea.object_pose.R * eb.object_pose.R.transpose());
  const double score = std::abs(gd[0].R.col(1).dot(gd[1].R.col(1))) + std::abs(gd[0].R.col(1).dot(gd[2].R.col(1))) +
                       std::abs(gd[1].R.col(1).dot(gd[2].R.col(1)));
  o.require(std::abs(score - td.score) < 1e-6, fmt("diamond set score %.4f", score));
  o.require(dp <= 1e-8 && dr <= 1e-8, fmt("estimates differ by %.3g m / %.3g rad", dp, dr));
  o.detail = fmt("score 0 vs %.4f triplet: estimates differ by %.2e m / %.2e rad", score, dp, dr) +
             (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

Outcome singularity_guard() {
  Outcome o;
  // Two parallel closing axes.
  const Pose a(oracle::frame_with_axis({0, 1, 0}, 0.0), Vec3::Zero());
  const Pose b(oracle::frame_with_axis({0, -1, 0}, 0.7), Vec3(0.01, 0, 0));
  const Pose c(oracle::frame_with_axis({1, 0, 0}, 0.0), Vec3::Zero());
  bool thrown = false;
  try {
    (void)estimate_pose({a, a, GraspRole::G1}, {b, b, GraspRole::G2}, {c, c, GraspRole::G3}, Pose());
  } catch (const Error& e) {
    thrown = e.code() == ErrorCode::SingularTriplet;
  }
  o.require(thrown, "parallel pair not rejected");
  bool thrown3 = false;
  try {
    (void)estimate_pose({a, a, GraspRole::G1}, {c, c, GraspRole::G2}, {b, b, GraspRole::G3}, Pose());
  } catch (const Error& e) {
    thrown3 = e.code() == ErrorCode::SingularTriplet;
  }
  o.require(thrown3, "parallel third grasp not rejected");

  // Random axis sets seeded with coplanar families: nothing emitted is
  // singular.
  std::mt19937_64 rng(77);
  std::size_t emitted = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<GraspGroup> groups;
    const Vec3 n = oracle::random_unit(rng);
    const Mat3 F = oracle::frame_with_axis(n, 0.0);
    for (int i = 0; i < 4; ++i) {
      const double t = i * 0.7 + 0.1;
      groups.push_back({canonical_axis(std::cos(t) * F.col(0) + std::sin(t) * F.col(2)), {i}});
    }
    groups.push_back({canonical_axis(oracle::random_unit(rng)), {4}});
    try {
      for (const Triplet& t : enumerate_triplets(groups)) {
        ++emitted;
        const Vec3& x = groups[static_cast<std::size_t>(t.groups[0])].axis;
        const Vec3& y = groups[static_cast<std::size_t>(t.groups[1])].axis;
        const Vec3& z = groups[static_cast<std::size_t>(t.groups[2])].axis;
        const double det = std::abs(x.dot(y.cross(z)));
        o.require(det > kDefaultSingularityTol, fmt("emitted |det| %.3g", det));
        o.require(t.groups[2] == 4, "coplanar triplet emitted");
      }
    } catch (const Error& e) {
      o.require(e.code() == ErrorCode::NoValidTriplet, e.what());
    }
  }
  o.detail = "parallel axes raise SingularTriplet; " + std::to_string(emitted) +
             " emitted triplets all non-coplanar" + (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

Outcome cli_determinism() {
  Outcome o;
  const fs::path root = fs::temp_directory_path() / "regrasp_acceptance_cli";
  fs::remove_all(root);
  const fs::path cfg_dir = REGRASP_SOURCE_DIR "/configs";
  // Small experiment config with traces on.
  auto cfg = io::read_json((cfg_dir / "l_square_experiment.json").string());
  cfg["n_repeats"] = 3;
  cfg["keep_traces"] = true;
  fs::create_directories(root);
  io::write_json(cfg, (root / "experiment.json").string());

  const std::string exe = REGRASP_CLI;
  const std::vector<std::string> commands = {
      "make-mesh --shape l-diamond --out {}/l_diamond.stl",
      "plan-grasps --mesh {}/l_diamond.stl --n-points 200 --n-rotations 8 --seed 3 --out {}/grasps.json",
      "triplets --grasps {}/grasps.json --out {}/triplets.json",
      "sequence --grasps {}/grasps.json --triplets {}/triplets.json --scene " + (cfg_dir / "scene.json").string() +
          " --out {}/plan.json",
      "simulate --plan {}/plan.json --truth " + (cfg_dir / "truth.json").string() + " --params " +
          (cfg_dir / "admittance.json").string() + " --out {}/conformed.json",
      "estimate --conformed {}/conformed.json --out {}/estimate.json",
      "experiment --config " + (root / "experiment.json").string() + " --out {}/report",
  };
  for (const char* run : {"run1", "run2"}) {
    const fs::path dir = root / run;
    fs::create_directories(dir);
    for (std::string cmd : commands) {
      // Run inside the output directory so documents that record input
      // paths record the same relative ones in both runs.
      for (std::size_t at; (at = cmd.find("{}")) != std::string::npos;) cmd.replace(at, 2, ".");
      const std::string line = "cd \"" + dir.string() + "\" && " + exe + " " + cmd + " > log.txt 2>&1";
      if (std::system(line.c_str()) != 0) {
        o.require(false, "command failed: " + cmd);
        return o;
      }
    }
  }
  std::size_t files = 0;
  for (const auto& entry : fs::recursive_directory_iterator(root / "run1")) {
    if (!entry.is_regular_file() || entry.path().filename() == "log.txt") continue;
    const fs::path other = root / "run2" / fs::relative(entry.path(), root / "run1");
    ++files;
    o.require(fs::exists(other) && slurp(entry.path()) == slurp(other),
              "differs: " + fs::relative(entry.path(), root / "run1").string());
  }
  o.require(files >= 9, "expected at least 9 output files, got " + std::to_string(files));
  o.detail = std::to_string(commands.size()) + " subcommands, " + std::to_string(files) +
             " output files byte-identical across two runs" + (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

Outcome sequencer_validity() {
  Outcome o;
  const GripperModel g;
  const Triple l = plan_for("l-square");
  const RegraspScene scene = fixture::table_scene();
  const RegraspPlan plan = plan_sequence(l.triplets, l.groups, l.grasps.candidates, scene, g, l.mesh);
  o.require(plan.triplet_index == 0 && plan.triplet.score < 1e-9, "L-square plan not on the score-0 triplet");
  for (const auto& e : validate_plan(plan, l.groups, l.grasps.candidates, scene, g)) o.require(false, e);
  int checked = 1;
  // Every placement of both experiment meshes.
  for (const char* mesh : {"l-square", "l-diamond", "diamond-prism"}) {
    const Triple t = mesh == std::string("l-square") ? l : plan_for(mesh);
    for (const NamedPose& place : fixture::three_placements()) {
      RegraspScene s = scene;
      s.object_start = place.pose;
      const RegraspPlan p = plan_sequence(t.triplets, t.groups, t.grasps.candidates, s, g, t.mesh);
      for (const auto& e : validate_plan(p, t.groups, t.grasps.candidates, s, g)) {
        o.require(false, std::string(mesh) + " " + place.name + ": " + e);
      }
      ++checked;
    }
  }
  o.detail = std::to_string(checked) + " plans validated independently; L-square uses triplet 0 (score " +
             fmt("%.1g", plan.triplet.score) + ")" + (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

}  // namespace

int main() {
  report(1, "exact recovery", exact_recovery);
  report(2, "orthogonality score", orthogonality_score);
  report(3, "admittance correctness", admittance);
  report(4, "conformance geometry", conformance_geometry);
  report(5, "noise repeatability", noise_repeatability);
  report(6, "non-orthogonality insensitivity", orthogonality_insensitivity);
  report(7, "singularity guard", singularity_guard);
  report(8, "CLI determinism", cli_determinism);
  report(9, "sequencer validity", sequencer_validity);
  return failures == 0 ? 0 : 1;
}
