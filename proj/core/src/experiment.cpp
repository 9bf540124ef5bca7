#include "regrasp/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

#include "regrasp/error.hpp"
#include "regrasp/triplet_selector.hpp"

namespace regrasp {

void TrialConfig::validate() const {
  if (placements.empty()) throw Error(ErrorCode::InvalidInput, "config has no placements");
  if (n_repeats < 1) throw Error(ErrorCode::InvalidInput, "n_repeats must be at least 1");
  if (threads < 1) throw Error(ErrorCode::InvalidInput, "threads must be at least 1");
  if (!(ranges.max_theta >= 0.0 && ranges.max_theta < std::numbers::pi) ||
      !(ranges.max_delta >= 0.0)) {
    throw Error(ErrorCode::InvalidInput, "truth ranges must be non-negative (theta below pi)");
  }
  if (ranges.max_delta > gripper.max_opening / 2.0) {
    throw Error(ErrorCode::InvalidInput, "max_delta exceeds half the gripper opening");
  }
  if (!(noise.sigma_p >= 0.0 && noise.sigma_r >= 0.0)) {
    throw Error(ErrorCode::InvalidInput, "noise sigmas must be non-negative");
  }
  if (!(closure_margin >= 0.0)) throw Error(ErrorCode::InvalidInput, "closure_margin must be >= 0");
  if (max_truth_resamples < 1) throw Error(ErrorCode::InvalidInput, "max_truth_resamples must be >= 1");
  for (const NamedPose& np : placements) {
    if (!is_valid_pose(np.pose)) throw Error(ErrorCode::InvalidInput, "invalid placement " + np.name);
  }
  if (!is_valid_pose(object_goal) || !is_valid_pose(handover)) {
    throw Error(ErrorCode::InvalidInput, "goal and handover must be valid poses");
  }
  gripper.validate();
  contact.validate();
  admittance.validate();
}

Pose apply_truth(const Pose& sim_object_pose, const Pose& g1_real, const ErrorParams& e) {
  const Mat3 turn = exp_so3(e.theta * g1_real.R.col(1));
  return {turn * sim_object_pose.R,
          sim_object_pose.p + e.delta_1 * g1_real.R.col(0) + e.delta_3 * g1_real.R.col(2)};
}

TruthSample inject_truth(const Pose& sim_object_pose, const Pose& g1_real,
                         const TruthRanges& ranges, Rng& rng) {
  ErrorParams e;
  e.theta = rng.uniform(-ranges.max_theta, ranges.max_theta);
  e.delta_1 = rng.uniform(-ranges.max_delta, ranges.max_delta);
  e.delta_3 = rng.uniform(-ranges.max_delta, ranges.max_delta);
  return {apply_truth(sim_object_pose, g1_real, e), e};
}

Vec3 rotation_difference_deg(const Mat3& a, const Mat3& b) {
  return log_so3(a * b.transpose()) * (180.0 / std::numbers::pi);
}

AxisStats axis_stats(const std::vector<Vec3>& samples) {
  AxisStats s;
  if (samples.empty()) return s;
  for (const Vec3& x : samples) s.mean += x;
  s.mean /= static_cast<double>(samples.size());
  if (samples.size() < 2) return s;
  Vec3 ss = Vec3::Zero();
  for (const Vec3& x : samples) ss += (x - s.mean).cwiseAbs2();
  s.std = (ss / static_cast<double>(samples.size() - 1)).cwiseSqrt();
  return s;
}

namespace {

constexpr int kTraceEvery = 10;

struct Prepared {
  std::vector<GraspCandidate> candidates;
  std::vector<GraspGroup> groups;
  std::vector<RegraspPlan> plans;  // per placement
};

Pose add_noise(const Pose& pose, const NoiseModel& noise, Rng& rng) {
  Vec3 dp, dr;
  for (int i = 0; i < 3; ++i) dp[i] = rng.gaussian();
  for (int i = 0; i < 3; ++i) dr[i] = rng.gaussian();
  return {exp_so3(noise.sigma_r * dr) * pose.R, pose.p + noise.sigma_p * dp};
}

TrialRow run_trial(const TrialConfig& cfg, const TriMesh& mesh, const Prepared& prep, int placement,
                   int repeat) {
  const RegraspPlan& plan = prep.plans[static_cast<std::size_t>(placement)];
  const auto& G1 = prep.candidates[static_cast<std::size_t>(plan.grasps[0])];
  const auto& G2 = prep.candidates[static_cast<std::size_t>(plan.grasps[1])];
  const auto& G3 = prep.candidates[static_cast<std::size_t>(plan.grasps[2])];
  const Pose sim_object = cfg.handover;
  const Pose g1_world = sim_object * G1.pose;
  const Pose g2_planned = sim_object * G2.pose;
  const Pose g3_planned = sim_object * G3.pose;

  Rng rng(derive_seed(cfg.seed, (static_cast<std::uint64_t>(placement) << 32) |
                                    static_cast<std::uint64_t>(repeat)));

  TrialRow row;
  row.placement = cfg.placements[static_cast<std::size_t>(placement)].name;
  row.placement_index = placement;
  row.repeat = repeat;

  const int trace_every = cfg.keep_traces ? kTraceEvery : 0;
  auto conform = [&](const Pose& planned, const GraspCandidate& g, const Pose& object,
                     const char* name) {
    ConformanceResult r =
        conform_grasp(planned, g.width - cfg.closure_margin, object, mesh, cfg.gripper,
                      cfg.contact, cfg.admittance, cfg.conformance, trace_every);
    if (!r.converged) {
      throw Error(ErrorCode::NotConverged,
                  std::string(name) + " did not settle within " +
                      std::to_string(cfg.conformance.max_steps) + " steps");
    }
    return r;
  };

  // Truth is drawn until both later grasps land on the faces they were
  // planned for, before and after conforming; beyond that the flat-contact
  // model does not apply. A hand can slide off the end of a narrow face and
  // settle with one pad free, which the second check catches.
  const double tol = cfg.conformance.redirect_tol;
  TruthSample truth;
  ConformanceResult c2, c3;
  for (int attempt = 0;; ++attempt) {
    if (attempt == cfg.max_truth_resamples) {
      throw Error(ErrorCode::InvalidInput, "no valid-contact truth after " +
                                               std::to_string(attempt) + " draws");
    }
    truth = inject_truth(sim_object, g1_world, cfg.ranges, rng);
    if (!contact_is_valid(g2_planned, truth.object_pose, mesh, G2.width, tol) ||
        !contact_is_valid(g3_planned, truth.object_pose, mesh, G3.width, tol)) {
      continue;
    }
    c2 = conform(g2_planned, G2, truth.object_pose, "g2");
    c3 = conform(g3_planned, G3, truth.object_pose, "g3");
    if (contact_is_valid(c2.conformed_pose, truth.object_pose, mesh, G2.width, tol) &&
        contact_is_valid(c3.conformed_pose, truth.object_pose, mesh, G3.width, tol)) {
      row.truth_resamples = attempt;
      break;
    }
  }
  row.truth = truth.params;

  const Pose g2_real = add_noise(c2.conformed_pose, cfg.noise, rng);
  const Pose g3_real = add_noise(c3.conformed_pose, cfg.noise, rng);

  // The estimator sees only the records and the simulated object pose.
  const GraspRecord r1{g1_world, g1_world, GraspRole::G1};
  const GraspRecord r2{g2_planned, g2_real, GraspRole::G2};
  const GraspRecord r3{g3_planned, g3_real, GraspRole::G3};
  row.estimate = estimate_pose(r1, r2, r3, sim_object, {cfg.singularity_tol});

  row.g2_dp_mm = 1000.0 * (g2_real.p - g2_planned.p);
  row.g3_dp_mm = 1000.0 * (g3_real.p - g3_planned.p);
  row.object_dp_mm = 1000.0 * (row.estimate.object_pose.p - truth.object_pose.p);
  row.g2_dw_deg = rotation_difference_deg(g2_real.R, g2_planned.R);
  row.g3_dw_deg = rotation_difference_deg(g3_real.R, g3_planned.R);
  row.object_dw_deg = rotation_difference_deg(row.estimate.object_pose.R, truth.object_pose.R);
  row.g2_trace = std::move(c2.trace);
  row.g3_trace = std::move(c3.trace);
  return row;
}

BlockStats block(const std::vector<const TrialRow*>& rows, Vec3 TrialRow::*dp, Vec3 TrialRow::*dw) {
  std::vector<Vec3> p, w;
  for (const TrialRow* r : rows) {
    p.push_back(r->*dp);
    w.push_back(r->*dw);
  }
  return {axis_stats(p), axis_stats(w)};
}

void summarize(const std::vector<const TrialRow*>& rows, BlockStats& g2, BlockStats& g3,
               BlockStats& object) {
  g2 = block(rows, &TrialRow::g2_dp_mm, &TrialRow::g2_dw_deg);
  g3 = block(rows, &TrialRow::g3_dp_mm, &TrialRow::g3_dw_deg);
  object = block(rows, &TrialRow::object_dp_mm, &TrialRow::object_dw_deg);
}

}  // namespace

TrialReport run_experiment(const TrialConfig& config) {
  return run_experiment(config, load_mesh(config.mesh, config.mesh_scale));
}

TrialReport run_experiment(const TrialConfig& config, const TriMesh& mesh) {
  config.validate();
  Prepared prep;
  const GraspPlan grasps = plan_grasps(mesh, config.gripper, config.planner);
  prep.candidates = grasps.candidates;
  if (prep.candidates.empty()) throw Error(ErrorCode::NoPairsFound, "no collision-free grasps");
  prep.groups = group_by_axis(prep.candidates, config.group_tol);
  const auto triplets = enumerate_triplets(prep.groups, config.singularity_tol);

  for (const NamedPose& placement : config.placements) {
    RegraspScene scene{placement.pose, config.object_goal, config.handover, config.arm_a,
                       config.arm_b};
    try {
      prep.plans.push_back(plan_sequence(triplets, prep.groups, prep.candidates, scene,
                                         config.gripper, mesh));
    } catch (const Error& e) {
      throw Error(e.code(), "placement " + placement.name + ": " + e.what());
    }
  }

  const int n_place = static_cast<int>(config.placements.size());
  const std::size_t n_trials = static_cast<std::size_t>(n_place) * static_cast<std::size_t>(config.n_repeats);
  std::vector<TrialRow> rows(n_trials);
  std::vector<std::exception_ptr> errors(n_trials);

  auto run_one = [&](std::size_t t) {
    const int placement = static_cast<int>(t / static_cast<std::size_t>(config.n_repeats));
    const int repeat = static_cast<int>(t % static_cast<std::size_t>(config.n_repeats));
    try {
      rows[t] = run_trial(config, mesh, prep, placement, repeat);
    } catch (const Error& e) {
      errors[t] = std::make_exception_ptr(
          Error(e.code(), "trial " + std::to_string(t) + " (placement " +
                              config.placements[static_cast<std::size_t>(placement)].name +
                              ", repeat " + std::to_string(repeat) + "): " + e.what()));
    } catch (...) {
      errors[t] = std::current_exception();
    }
  };

  if (config.threads == 1) {
    for (std::size_t t = 0; t < n_trials; ++t) run_one(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int i = 0; i < config.threads; ++i) {
      pool.emplace_back([&] {
        for (std::size_t t = next++; t < n_trials; t = next++) run_one(t);
      });
    }
    for (std::thread& th : pool) th.join();
  }
  // Report the first failure in trial order, independent of scheduling.
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  TrialReport report;
  report.n_candidates = static_cast<int>(prep.candidates.size());
  report.n_groups = static_cast<int>(prep.groups.size());
  std::vector<const TrialRow*> all;
  for (int i = 0; i < n_place; ++i) {
    PlacementSummary s;
    s.name = config.placements[static_cast<std::size_t>(i)].name;
    s.plan = prep.plans[static_cast<std::size_t>(i)];
    std::vector<const TrialRow*> mine;
    for (const TrialRow& r : rows) {
      if (r.placement_index == i) mine.push_back(&r);
    }
    s.n = static_cast<int>(mine.size());
    summarize(mine, s.g2, s.g3, s.object);
    all.insert(all.end(), mine.begin(), mine.end());
    report.placements.push_back(std::move(s));
  }
  summarize(all, report.g2, report.g3, report.object);
  report.rows = std::move(rows);
  return report;
}

namespace {

void put(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << ',' << buf;
}

void put(std::ostream& out, const Vec3& v) {
  for (int i = 0; i < 3; ++i) put(out, v[i]);
}

}  // namespace

void write_trials_csv(const TrialReport& report, std::ostream& out) {
  out << "placement,repeat";
  for (const char* q : {"dp", "dw"}) {
    for (const char* who : {"g2", "g3", "object"}) {
      for (const char* ax : {"x", "y", "z"}) out << ',' << who << '_' << q << '_' << ax;
    }
  }
  out << ",truth_resamples\n";
  for (const TrialRow& r : report.rows) {
    out << r.placement << ',' << r.repeat;
    put(out, r.g2_dp_mm);
    put(out, r.g3_dp_mm);
    put(out, r.object_dp_mm);
    put(out, r.g2_dw_deg);
    put(out, r.g3_dw_deg);
    put(out, r.object_dw_deg);
    out << ',' << r.truth_resamples << '\n';
  }
}

void write_traces_csv(const TrialReport& report, std::ostream& out) {
  out << "placement,repeat,grasp,step,fx,fy,fz,tx,ty,tz,px,py,pz\n";
  for (const TrialRow& r : report.rows) {
    for (int g = 0; g < 2; ++g) {
      for (const TraceSample& s : g == 0 ? r.g2_trace : r.g3_trace) {
        out << r.placement << ',' << r.repeat << ',' << (g == 0 ? "g2" : "g3") << ',' << s.step;
        put(out, s.force);
        put(out, s.torque);
        put(out, s.position);
        out << '\n';
      }
    }
  }
}

}  // namespace regrasp
