// Command-line front end: one subcommand per pipeline stage plus the batch
// experiment. Every output is a pure function of the inputs and seeds.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "regrasp/error.hpp"
#include "regrasp/experiment.hpp"
#include "regrasp/serialization.hpp"
#include "regrasp/shapes.hpp"

namespace fs = std::filesystem;
using namespace regrasp;
using io::json;

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  return out;
}

// Traces go next to the main output: conformed.json -> conformed_traces.csv.
std::string sibling(const std::string& path, const std::string& suffix) {
  fs::path p(path);
  return (p.parent_path() / (p.stem().string() + suffix)).string();
}

// ---------------------------------------------------------------- plan-grasps

struct PlanGraspsArgs {
  std::string mesh, out, gripper;
  double scale = 0.001;
  PlannerParams params;
};

void plan_grasps_cmd(const PlanGraspsArgs& a) {
  const TriMesh mesh = load_mesh(a.mesh, a.scale);
  const GripperModel gripper = a.gripper.empty() ? GripperModel{} : io::gripper_from_json(io::read_json(a.gripper));
  const GraspPlan plan = plan_grasps(mesh, gripper, a.params);
  io::write_json(io::grasps_document(plan.candidates, a.mesh, a.scale, a.params, gripper), a.out);
  std::printf("%zu pairs, %zu grasps -> %s\n", plan.pairs.size(), plan.candidates.size(), a.out.c_str());
}

// ------------------------------------------------------------------- triplets

struct TripletsArgs {
  std::string grasps, out;
  double group_tol = kDefaultGroupTol;
  double singularity_tol = kDefaultSingularityTol;
};

void triplets_cmd(const TripletsArgs& a) {
  const auto grasps = io::grasps_from_document(io::read_json(a.grasps));
  if (grasps.empty()) throw Error(ErrorCode::InvalidInput, a.grasps + " holds no grasps");
  const auto groups = group_by_axis(grasps, a.group_tol);
  const auto triplets = enumerate_triplets(groups, a.singularity_tol);
  io::write_json(io::triplets_document(groups, triplets), a.out);
  std::printf("%zu groups, %zu triplets, best score %.6g -> %s\n", groups.size(), triplets.size(),
              triplets.front().score, a.out.c_str());
}

// ------------------------------------------------------------------- sequence

struct SequenceArgs {
  std::string grasps, triplets, scene, out;
};

void sequence_cmd(const SequenceArgs& a) {
  const json gdoc = io::read_json(a.grasps);
  const auto grasps = io::grasps_from_document(gdoc);
  const std::string mesh_path = gdoc.at("mesh").get<std::string>();
  const double scale = gdoc.value("mesh_scale", 0.001);
  const GripperModel gripper = io::gripper_from_json(gdoc.value("gripper", json::object()));
  const TriMesh mesh = load_mesh(mesh_path, scale);

  const json tdoc = io::read_json(a.triplets);
  const auto groups = io::groups_from_document(tdoc);
  const auto triplets = io::triplets_from_document(tdoc);
  const RegraspScene scene = io::scene_from_json(io::read_json(a.scene));

  const RegraspPlan plan = plan_sequence(triplets, groups, grasps, scene, gripper, mesh);
  const auto problems = validate_plan(plan, groups, grasps, scene, gripper);
  if (!problems.empty()) throw Error(ErrorCode::PlanNotFound, "plan failed validation: " + problems.front());

  // Self-contained plan: the three grasps, the gripper and the mesh travel
  // with it so that `simulate` needs nothing else.
  json doc = io::to_json(plan);
  json used = json::array();
  for (int g : plan.grasps) used.push_back(io::to_json(grasps[static_cast<std::size_t>(g)]));
  doc["used_grasps"] = used;
  doc["mesh"] = mesh_path;
  doc["mesh_scale"] = scale;
  doc["gripper"] = io::to_json(gripper);
  doc["handover"] = io::to_json(scene.handover);
  io::write_json(doc, a.out);
  std::printf("plan on triplet %d (score %.6g), grasps %d %d %d -> %s\n", plan.triplet_index,
              plan.triplet.score, plan.grasps[0], plan.grasps[1], plan.grasps[2], a.out.c_str());
}

// ------------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string plan, truth, params, out;
};

// Truth file: either {"object_pose": pose} or the error parameters
// {"theta": rad, "delta_1": m, "delta_3": m} applied about the first grasp.
Pose read_truth(const json& j, const Pose& sim_object, const Pose& g1_world) {
  if (j.contains("object_pose")) return io::pose_from_json(j.at("object_pose"));
  for (const auto& [key, _] : j.items()) {
    if (key != "theta" && key != "delta_1" && key != "delta_3") {
      throw Error(ErrorCode::InvalidInput, "unknown key in truth file: " + key);
    }
  }
  ErrorParams e;
  e.theta = j.value("theta", 0.0);
  e.delta_1 = j.value("delta_1", 0.0);
  e.delta_3 = j.value("delta_3", 0.0);
  return apply_truth(sim_object, g1_world, e);
}

int simulate_cmd(const SimulateArgs& a) {
  const json pdoc = io::read_json(a.plan);
  const TriMesh mesh = load_mesh(pdoc.at("mesh").get<std::string>(), pdoc.value("mesh_scale", 0.001));
  const GripperModel gripper = io::gripper_from_json(pdoc.value("gripper", json::object()));
  const Pose sim_object = io::pose_from_json(pdoc.at("handover"));
  std::array<GraspCandidate, 3> g;
  for (std::size_t k = 0; k < 3; ++k) g[k] = io::grasp_from_json(pdoc.at("used_grasps").at(k));

  AdmittanceParams params;
  ContactModel contact;
  ConformanceOptions options;
  double margin = 0.002;
  if (!a.params.empty()) io::admittance_from_json(io::read_json(a.params), params, contact, options, margin);

  const Pose g1_world = sim_object * g[0].pose;
  const Pose truth = read_truth(io::read_json(a.truth), sim_object, g1_world);

  json records = json::array();
  json report = json::array();
  std::ofstream traces = open_out(sibling(a.out, "_traces.csv"));
  traces << "grasp,step,fx,fy,fz,tx,ty,tz,px,py,pz\n";
  char line[512];
  records.push_back(io::to_json(GraspRecord{g1_world, g1_world, GraspRole::G1}));
  bool all_converged = true;
  for (std::size_t k = 1; k < 3; ++k) {
    const Pose planned = sim_object * g[k].pose;
    const auto r = conform_grasp(planned, g[k].width - margin, truth, mesh, gripper, contact, params,
                                 options, 10);
    all_converged = all_converged && r.converged;
    records.push_back(io::to_json(GraspRecord{planned, r.conformed_pose, k == 1 ? GraspRole::G2 : GraspRole::G3}));
    report.push_back({{"grasp", k == 1 ? "g2" : "g3"},
                      {"converged", r.converged},
                      {"steps", r.steps_used},
                      {"redirected", r.redirected},
                      {"residual_force", io::to_json(r.residual_force)},
                      {"residual_torque", io::to_json(r.residual_torque)},
                      {"contact_valid", contact_is_valid(r.conformed_pose, truth, mesh, g[k].width,
                                                         options.redirect_tol, 1e-6)}});
    for (const TraceSample& s : r.trace) {
      std::snprintf(line, sizeof line, "g%zu,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                    k + 1, s.step, s.force.x(), s.force.y(), s.force.z(), s.torque.x(), s.torque.y(),
                    s.torque.z(), s.position.x(), s.position.y(), s.position.z());
      traces << line;
    }
  }
  io::write_json({{"sim_object_pose", io::to_json(sim_object)},
                  {"records", records},
                  {"conformance", report}},
                 a.out);
  std::printf("conformed g2/g3 -> %s\n", a.out.c_str());
  if (!all_converged) {
    std::fprintf(stderr, "error: NotConverged: conformance did not settle (see %s)\n", a.out.c_str());
    return 3;
  }
  return 0;
}

// ------------------------------------------------------------------- estimate

struct EstimateArgs {
  std::string conformed, sim_object, out;
};

void estimate_cmd(const EstimateArgs& a) {
  const json cdoc = io::read_json(a.conformed);
  Pose sim_object;
  if (a.sim_object.empty()) {
    sim_object = io::pose_from_json(cdoc.at("sim_object_pose"));
  } else {
    const json j = io::read_json(a.sim_object);
    sim_object = io::pose_from_json(j.is_object() && j.contains("sim_object_pose") ? j.at("sim_object_pose") : j);
  }
  std::array<GraspRecord, 3> r;
  bool seen[3] = {false, false, false};
  for (const json& j : cdoc.at("records")) {
    const GraspRecord rec = io::record_from_json(j);
    const auto k = static_cast<std::size_t>(rec.role);
    if (seen[k]) throw Error(ErrorCode::InvalidInput, "duplicate grasp role in " + a.conformed);
    seen[k] = true;
    r[k] = rec;
  }
  if (!seen[0] || !seen[1] || !seen[2]) throw Error(ErrorCode::InvalidInput, a.conformed + " needs g1, g2 and g3");
  const EstimationResult e = estimate_pose(r[0], r[1], r[2], sim_object);
  io::write_json(io::to_json(e), a.out);
  std::printf("theta %.6g deg, epsilon %.6g mm -> %s\n", e.theta * 180.0 / std::numbers::pi,
              e.epsilon * 1000.0, a.out.c_str());
}

// ----------------------------------------------------------------- experiment

struct ExperimentArgs {
  std::string config, out;
  int threads = 0;
};

void experiment_cmd(const ExperimentArgs& a) {
  TrialConfig config = io::config_from_json(io::read_json(a.config));
  if (a.threads > 0) config.threads = a.threads;
  // Relative mesh paths are taken relative to the config file.
  if (config.mesh.rfind("builtin:", 0) != 0 && fs::path(config.mesh).is_relative()) {
    config.mesh = (fs::path(a.config).parent_path() / config.mesh).string();
  }
  const TrialReport report = run_experiment(config);
  fs::create_directories(a.out);
  {
    std::ofstream out = open_out((fs::path(a.out) / "trials.csv").string());
    write_trials_csv(report, out);
  }
  if (config.keep_traces) {
    std::ofstream out = open_out((fs::path(a.out) / "traces.csv").string());
    write_traces_csv(report, out);
  }
  io::write_json(io::summary_json(report), (fs::path(a.out) / "summary.json").string());
  const AxisStats& s = report.object.dp_mm;
  std::printf("%zu trials; object dp std [mm] %.4g %.4g %.4g -> %s\n", report.rows.size(), s.std.x(),
              s.std.y(), s.std.z(), a.out.c_str());
}

// ------------------------------------------------------------------ make-mesh

struct MakeMeshArgs {
  std::string shape, out;
};

void make_mesh_cmd(const MakeMeshArgs& a) {
  const TriMesh mesh = shapes::builtin(a.shape);
  const std::string ext = fs::path(a.out).extension().string();
  if (ext == ".stl") {
    save_stl(mesh, a.out);
  } else if (ext == ".obj") {
    save_obj(mesh, a.out);
  } else {
    throw Error(ErrorCode::InvalidInput, "output must end in .stl or .obj: " + a.out);
  }
  std::printf("%s: %zu faces -> %s\n", a.shape.c_str(), mesh.num_faces(), a.out.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regrasp planning and in-hand pose estimation"};
  app.require_subcommand(1);
  int status = 0;

  PlanGraspsArgs pg;
  auto* c_pg = app.add_subcommand("plan-grasps", "Sample antipodal grasps on a mesh");
  c_pg->add_option("--mesh", pg.mesh, "STL/OBJ file or builtin:<name>")->required();
  c_pg->add_option("--scale", pg.scale, "File units to meters")->capture_default_str();
  c_pg->add_option("--n-points", pg.params.n_points)->capture_default_str()->check(CLI::PositiveNumber);
  c_pg->add_option("--n-rotations", pg.params.n_rotations)->capture_default_str()->check(CLI::PositiveNumber);
  c_pg->add_option("--antipodal-tol", pg.params.antipodal_tol)->capture_default_str();
  c_pg->add_option("--seed", pg.params.seed)->capture_default_str();
  c_pg->add_option("--gripper", pg.gripper, "Gripper JSON");
  c_pg->add_option("--out", pg.out)->required();
  c_pg->callback([&] { plan_grasps_cmd(pg); });

  TripletsArgs tr;
  auto* c_tr = app.add_subcommand("triplets", "Group grasps by closing axis and rank triplets");
  c_tr->add_option("--grasps", tr.grasps)->required();
  c_tr->add_option("--group-tol", tr.group_tol)->capture_default_str();
  c_tr->add_option("--singularity-tol", tr.singularity_tol)->capture_default_str();
  c_tr->add_option("--out", tr.out)->required();
  c_tr->callback([&] { triplets_cmd(tr); });

  SequenceArgs sq;
  auto* c_sq = app.add_subcommand("sequence", "Search a three-grasp handover sequence");
  c_sq->add_option("--grasps", sq.grasps)->required();
  c_sq->add_option("--triplets", sq.triplets)->required();
  c_sq->add_option("--scene", sq.scene)->required();
  c_sq->add_option("--out", sq.out)->required();
  c_sq->callback([&] { sequence_cmd(sq); });

  SimulateArgs sm;
  auto* c_sm = app.add_subcommand("simulate", "Conform the second and third grasps to a true pose");
  c_sm->add_option("--plan", sm.plan)->required();
  c_sm->add_option("--truth", sm.truth)->required();
  c_sm->add_option("--params", sm.params, "Admittance/contact JSON");
  c_sm->add_option("--out", sm.out)->required();
  c_sm->callback([&] { status = simulate_cmd(sm); });

  EstimateArgs es;
  auto* c_es = app.add_subcommand("estimate", "Recover the object pose from conformed grasps");
  c_es->add_option("--conformed", es.conformed)->required();
  c_es->add_option("--sim-object", es.sim_object, "Pose JSON (default: taken from --conformed)");
  c_es->add_option("--out", es.out)->required();
  c_es->callback([&] { estimate_cmd(es); });

  ExperimentArgs ex;
  auto* c_ex = app.add_subcommand("experiment", "Run randomized trials and write CSV/JSON reports");
  c_ex->add_option("--config", ex.config)->required();
  c_ex->add_option("--out", ex.out, "Output directory")->required();
  c_ex->add_option("--threads", ex.threads, "Override the config's thread count");
  c_ex->callback([&] { experiment_cmd(ex); });

  MakeMeshArgs mm;
  auto* c_mm = app.add_subcommand("make-mesh", "Write a builtin shape to STL or OBJ");
  c_mm->add_option("--shape", mm.shape)->required()->check(CLI::IsMember(shapes::builtin_names()));
  c_mm->add_option("--out", mm.out)->required();
  c_mm->callback([&] { make_mesh_cmd(mm); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return status;
}
