#include "regrasp/serialization.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "regrasp/error.hpp"

namespace regrasp::io {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::InvalidInput, what); }

const json& need(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing key \"") + key + "\"");
  return j.at(key);
}

template <typename T>
T value_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    bad(std::string("key \"") + key + "\" has the wrong type");
  }
}

double number(const json& j, const char* what) {
  if (!j.is_number()) bad(std::string(what) + " must be a number");
  return j.get<double>();
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* where) {
  if (!j.is_object()) bad(std::string(where) + " must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items()) {
    if (!ok.contains(k)) bad(std::string("unknown key \"") + k + "\" in " + where);
  }
}

}  // namespace

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidInput, path + ": " + e.what());
  }
}

void write_json(const json& value, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out << value.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path);
}

json to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec3_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) bad("expected a 3-vector");
  return {number(j[0], "vector entry"), number(j[1], "vector entry"), number(j[2], "vector entry")};
}

json to_json(const Pose& pose) {
  json a = json::array();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) a.push_back(pose.R(r, c));
  }
  for (int i = 0; i < 3; ++i) a.push_back(pose.p[i]);
  return a;
}

Pose pose_from_json(const json& j) {
  Pose pose;
  if (j.is_array()) {
    if (j.size() != 12) bad("pose arrays hold 12 numbers (R row-major, then p)");
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) pose.R(r, c) = number(j[static_cast<std::size_t>(3 * r + c)], "pose entry");
    }
    for (int i = 0; i < 3; ++i) pose.p[i] = number(j[static_cast<std::size_t>(9 + i)], "pose entry");
  } else if (j.is_object()) {
    check_keys(j, {"rotvec", "p"}, "pose");
    pose.R = j.contains("rotvec") ? exp_so3(vec3_from_json(j.at("rotvec"))) : Mat3::Identity();
    pose.p = j.contains("p") ? vec3_from_json(j.at("p")) : Vec3::Zero();
  } else {
    bad("pose must be a 12-number array or {\"rotvec\", \"p\"}");
  }
  if (!is_valid_pose(pose, 1e-6)) bad("pose rotation is not orthonormal");
  // Inputs are typically written with limited digits; snap back onto SO(3).
  if (!is_valid_rotation(pose.R)) pose.R = orthonormalize(pose.R);
  return pose;
}

Mat3 mat3_from_json(const json& j) {
  if (j.is_number()) return j.get<double>() * Mat3::Identity();
  if (j.is_array() && j.size() == 3 && j[0].is_number()) return vec3_from_json(j).asDiagonal();
  if (j.is_array() && j.size() == 3) {
    Mat3 m;
    for (int r = 0; r < 3; ++r) m.row(r) = vec3_from_json(j[static_cast<std::size_t>(r)]).transpose();
    return m;
  }
  bad("matrix must be a scalar, a diagonal 3-vector, or 3x3 rows");
}

json to_json(const GraspCandidate& g) {
  return {{"pose", to_json(g.pose)}, {"width", g.width}, {"closing_axis", to_json(g.closing_axis)},
          {"pair", g.pair_index}};
}

GraspCandidate grasp_from_json(const json& j) {
  const Pose pose = pose_from_json(need(j, "pose"));
  return GraspCandidate::from_pose(pose, number(need(j, "width"), "width"), value_or(j, "pair", -1));
}

json to_json(const GripperModel& g) {
  return {{"max_opening", g.max_opening},       {"pad_width", g.pad_width},
          {"pad_height", g.pad_height},         {"finger_depth", g.finger_depth},
          {"finger_thickness", g.finger_thickness}, {"palm_size", to_json(g.palm_size)}};
}

GripperModel gripper_from_json(const json& j, GripperModel g) {
  check_keys(j, {"max_opening", "pad_width", "pad_height", "finger_depth", "finger_thickness", "palm_size"},
             "gripper");
  g.max_opening = value_or(j, "max_opening", g.max_opening);
  g.pad_width = value_or(j, "pad_width", g.pad_width);
  g.pad_height = value_or(j, "pad_height", g.pad_height);
  g.finger_depth = value_or(j, "finger_depth", g.finger_depth);
  g.finger_thickness = value_or(j, "finger_thickness", g.finger_thickness);
  if (j.contains("palm_size")) g.palm_size = vec3_from_json(j.at("palm_size"));
  g.validate();
  return g;
}

json grasps_document(const std::vector<GraspCandidate>& grasps, const std::string& mesh,
                     double mesh_scale, const PlannerParams& params, const GripperModel& gripper) {
  json list = json::array();
  for (const GraspCandidate& g : grasps) list.push_back(to_json(g));
  return {{"mesh", mesh},
          {"mesh_scale", mesh_scale},
          {"params",
           {{"n_points", params.n_points},
            {"n_rotations", params.n_rotations},
            {"antipodal_tol", params.antipodal_tol},
            {"seed", params.seed}}},
          {"gripper", to_json(gripper)},
          {"grasps", list}};
}

std::vector<GraspCandidate> grasps_from_document(const json& doc) {
  std::vector<GraspCandidate> out;
  const json& list = doc.is_array() ? doc : need(doc, "grasps");
  for (const json& g : list) out.push_back(grasp_from_json(g));
  return out;
}

json triplets_document(const std::vector<GraspGroup>& groups, const std::vector<Triplet>& triplets) {
  json g = json::array();
  for (const GraspGroup& grp : groups) g.push_back({{"axis", to_json(grp.axis)}, {"members", grp.members}});
  json t = json::array();
  for (const Triplet& tr : triplets) {
    t.push_back({{"groups", tr.groups}, {"score", tr.score}, {"determinant", tr.determinant}});
  }
  return {{"groups", g}, {"triplets", t}};
}

std::vector<GraspGroup> groups_from_document(const json& doc) {
  std::vector<GraspGroup> out;
  for (const json& g : need(doc, "groups")) {
    out.push_back({vec3_from_json(need(g, "axis")), need(g, "members").get<std::vector<int>>()});
  }
  return out;
}

std::vector<Triplet> triplets_from_document(const json& doc) {
  std::vector<Triplet> out;
  for (const json& t : need(doc, "triplets")) {
    Triplet tr;
    tr.groups = need(t, "groups").get<std::array<int, 3>>();
    tr.score = number(need(t, "score"), "score");
    tr.determinant = value_or(t, "determinant", 0.0);
    out.push_back(tr);
  }
  return out;
}

json to_json(const ArmModel& arm) {
  return {{"id", to_string(arm.id)},
          {"workspace", {{"min", to_json(arm.workspace.min)}, {"max", to_json(arm.workspace.max)}}},
          {"home", to_json(arm.home)}};
}

ArmModel arm_from_json(const json& j) {
  check_keys(j, {"id", "workspace", "home"}, "arm");
  ArmModel arm;
  arm.id = arm_from_string(need(j, "id").get<std::string>());
  const json& ws = need(j, "workspace");
  arm.workspace = Aabb(vec3_from_json(need(ws, "min")), vec3_from_json(need(ws, "max")));
  if (arm.workspace.empty()) bad("arm workspace is empty");
  if (j.contains("home")) arm.home = pose_from_json(j.at("home"));
  return arm;
}

namespace {

void read_arms(const json& arms, ArmModel& a, ArmModel& b) {
  if (!arms.is_array() || arms.size() != 2) bad("\"arms\" must list two arms");
  bool seen[2] = {false, false};
  for (const json& j : arms) {
    ArmModel arm = arm_from_json(j);
    const int k = arm.id == ArmId::A ? 0 : 1;
    if (seen[k]) bad("arm listed twice");
    seen[k] = true;
    (k == 0 ? a : b) = arm;
  }
}

}  // namespace

RegraspScene scene_from_json(const json& j) {
  check_keys(j, {"object_start", "object_goal", "handover", "arms"}, "scene");
  RegraspScene s;
  s.object_start = pose_from_json(need(j, "object_start"));
  s.object_goal = pose_from_json(need(j, "object_goal"));
  s.handover = pose_from_json(need(j, "handover"));
  read_arms(need(j, "arms"), s.arm_a, s.arm_b);
  return s;
}

json to_json(const RegraspPlan& plan) {
  json steps = json::array();
  for (const PlanStep& s : plan.steps) {
    steps.push_back({{"arm", to_string(s.arm)},
                     {"grasp", s.grasp},
                     {"phase", to_string(s.phase)},
                     {"gripper_pose", to_json(s.gripper_pose)},
                     {"object_pose", to_json(s.object_pose)}});
  }
  return {{"triplet_index", plan.triplet_index},
          {"triplet",
           {{"groups", plan.triplet.groups},
            {"score", plan.triplet.score},
            {"determinant", plan.triplet.determinant}}},
          {"grasps", plan.grasps},
          {"steps", steps}};
}

RegraspPlan plan_from_json(const json& j) {
  RegraspPlan plan;
  plan.triplet_index = value_or(j, "triplet_index", -1);
  const json& t = need(j, "triplet");
  plan.triplet.groups = need(t, "groups").get<std::array<int, 3>>();
  plan.triplet.score = value_or(t, "score", 0.0);
  plan.triplet.determinant = value_or(t, "determinant", 0.0);
  plan.grasps = need(j, "grasps").get<std::array<int, 3>>();
  for (const json& s : need(j, "steps")) {
    plan.steps.push_back({arm_from_string(need(s, "arm").get<std::string>()),
                          need(s, "grasp").get<int>(), pose_from_json(need(s, "gripper_pose")),
                          pose_from_json(need(s, "object_pose")),
                          phase_from_string(need(s, "phase").get<std::string>())});
  }
  return plan;
}

void admittance_from_json(const json& j, AdmittanceParams& p, ContactModel& contact,
                          ConformanceOptions& options, double& closure_margin) {
  check_keys(j,
             {"M", "B", "K", "M_r", "B_r", "K_r", "f_d", "dt", "pad_stiffness", "samples_per_side",
              "force_tol", "torque_tol", "max_steps", "rotational", "redirect_tol", "closure_margin"},
             "admittance");
  if (j.contains("M")) p.M = mat3_from_json(j.at("M"));
  if (j.contains("B")) p.B = mat3_from_json(j.at("B"));
  if (j.contains("K")) p.K = mat3_from_json(j.at("K"));
  if (j.contains("M_r")) p.M_r = mat3_from_json(j.at("M_r"));
  if (j.contains("B_r")) p.B_r = mat3_from_json(j.at("B_r"));
  if (j.contains("K_r")) p.K_r = mat3_from_json(j.at("K_r"));
  if (j.contains("f_d")) p.f_d = vec3_from_json(j.at("f_d"));
  p.dt = value_or(j, "dt", p.dt);
  contact.pad_stiffness = value_or(j, "pad_stiffness", contact.pad_stiffness);
  contact.samples_per_side = value_or(j, "samples_per_side", contact.samples_per_side);
  options.force_tol = value_or(j, "force_tol", options.force_tol);
  options.torque_tol = value_or(j, "torque_tol", options.torque_tol);
  options.max_steps = value_or(j, "max_steps", options.max_steps);
  options.rotational = value_or(j, "rotational", options.rotational);
  options.redirect_tol = value_or(j, "redirect_tol", options.redirect_tol);
  closure_margin = value_or(j, "closure_margin", closure_margin);
  p.validate();
  contact.validate();
}

namespace {

const char* role_name(GraspRole r) {
  switch (r) {
    case GraspRole::G1: return "g1";
    case GraspRole::G2: return "g2";
    case GraspRole::G3: return "g3";
  }
  return "?";
}

}  // namespace

json to_json(const GraspRecord& r) {
  return {{"role", role_name(r.role)}, {"sim_pose", to_json(r.sim_pose)}, {"real_pose", to_json(r.real_pose)}};
}

GraspRecord record_from_json(const json& j) {
  GraspRecord r;
  const std::string role = need(j, "role").get<std::string>();
  if (role == "g1") r.role = GraspRole::G1;
  else if (role == "g2") r.role = GraspRole::G2;
  else if (role == "g3") r.role = GraspRole::G3;
  else bad("unknown grasp role " + role);
  r.sim_pose = pose_from_json(need(j, "sim_pose"));
  r.real_pose = pose_from_json(need(j, "real_pose"));
  return r;
}

json to_json(const EstimationResult& e) {
  return {{"object_pose", to_json(e.object_pose)},
          {"theta_deg", e.theta * 180.0 / std::numbers::pi},
          {"epsilon_mm", e.epsilon * 1000.0},
          {"d_allowed", to_json(e.d_allowed)},
          {"plane_correction_mm", e.plane_correction * 1000.0},
          {"conditioning", e.conditioning}};
}

TrialConfig config_from_json(const json& j) {
  check_keys(j,
             {"mesh", "mesh_scale", "placements", "object_goal", "handover", "arms", "max_theta",
              "max_delta", "sigma_p", "sigma_r", "n_repeats", "seed", "planner", "group_tol",
              "singularity_tol", "gripper", "admittance", "max_truth_resamples", "threads",
              "keep_traces"},
             "config");
  TrialConfig c;
  c.mesh = value_or<std::string>(j, "mesh", c.mesh);
  c.mesh_scale = value_or(j, "mesh_scale", c.mesh_scale);
  for (const json& p : need(j, "placements")) {
    c.placements.push_back({need(p, "name").get<std::string>(), pose_from_json(need(p, "pose"))});
  }
  c.object_goal = pose_from_json(need(j, "object_goal"));
  c.handover = pose_from_json(need(j, "handover"));
  read_arms(need(j, "arms"), c.arm_a, c.arm_b);
  c.ranges.max_theta = value_or(j, "max_theta", c.ranges.max_theta);
  c.ranges.max_delta = value_or(j, "max_delta", c.ranges.max_delta);
  c.noise.sigma_p = value_or(j, "sigma_p", c.noise.sigma_p);
  c.noise.sigma_r = value_or(j, "sigma_r", c.noise.sigma_r);
  c.n_repeats = value_or(j, "n_repeats", c.n_repeats);
  c.seed = value_or<std::uint64_t>(j, "seed", c.seed);
  c.planner.seed = c.seed;
  if (j.contains("planner")) {
    const json& p = j.at("planner");
    check_keys(p, {"n_points", "n_rotations", "antipodal_tol", "seed"}, "planner");
    c.planner.n_points = value_or(p, "n_points", c.planner.n_points);
    c.planner.n_rotations = value_or(p, "n_rotations", c.planner.n_rotations);
    c.planner.antipodal_tol = value_or(p, "antipodal_tol", c.planner.antipodal_tol);
    c.planner.seed = value_or<std::uint64_t>(p, "seed", c.planner.seed);
  }
  c.group_tol = value_or(j, "group_tol", c.group_tol);
  c.singularity_tol = value_or(j, "singularity_tol", c.singularity_tol);
  if (j.contains("gripper")) c.gripper = gripper_from_json(j.at("gripper"));
  if (j.contains("admittance")) {
    admittance_from_json(j.at("admittance"), c.admittance, c.contact, c.conformance, c.closure_margin);
  }
  c.max_truth_resamples = value_or(j, "max_truth_resamples", c.max_truth_resamples);
  c.threads = value_or(j, "threads", c.threads);
  c.keep_traces = value_or(j, "keep_traces", c.keep_traces);
  c.validate();
  return c;
}

namespace {

json stats_json(const AxisStats& s) { return {{"mean", to_json(s.mean)}, {"std", to_json(s.std)}}; }

json block_json(const BlockStats& b) {
  return {{"dp_mm", stats_json(b.dp_mm)}, {"dw_deg", stats_json(b.dw_deg)}};
}

}  // namespace

json summary_json(const TrialReport& report) {
  json places = json::array();
  for (const PlacementSummary& p : report.placements) {
    places.push_back({{"name", p.name},
                      {"n", p.n},
                      {"plan",
                       {{"triplet_index", p.plan.triplet_index},
                        {"score", p.plan.triplet.score},
                        {"grasps", p.plan.grasps}}},
                      {"g2", block_json(p.g2)},
                      {"g3", block_json(p.g3)},
                      {"object", block_json(p.object)}});
  }
  int resamples = 0;
  for (const TrialRow& r : report.rows) resamples += r.truth_resamples;
  return {{"n_trials", report.rows.size()},
          {"n_candidates", report.n_candidates},
          {"n_groups", report.n_groups},
          {"truth_resamples", resamples},
          {"placements", places},
          {"overall", {{"g2", block_json(report.g2)}, {"g3", block_json(report.g3)}, {"object", block_json(report.object)}}}};
}

}  // namespace regrasp::io
