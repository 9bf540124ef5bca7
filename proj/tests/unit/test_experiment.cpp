#include <gtest/gtest.h>

#include <sstream>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "regrasp/error.hpp"
#include "regrasp/experiment.hpp"

using namespace regrasp;

namespace {

std::string trials_csv(const TrialReport& r) {
  std::ostringstream out;
  write_trials_csv(r, out);
  return out.str();
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST(InjectTruth, ZeroRangesKeepIdeal) {
  Rng rng(1);
  const Pose sim(exp_so3({0.1, 0.2, 0.3}), Vec3(0.1, 0.2, 0.3));
  const Pose g1 = sim * Pose(oracle::frame_with_axis({0, 1, 0}, 0.3), Vec3(0.01, 0, 0));
  const TruthSample t = inject_truth(sim, g1, {0.0, 0.0}, rng);
  EXPECT_TRUE(t.object_pose == sim);
}

TEST(InjectTruth, DeltaOneMovesAlongFirstColumn) {
  const Pose sim(exp_so3({0.1, 0.2, 0.3}), Vec3(0.1, 0.2, 0.3));
  const Pose g1 = sim * Pose(oracle::frame_with_axis({0, 1, 0}, 0.3), Vec3(0.01, 0, 0));
  ErrorParams e;
  e.delta_1 = 0.005;
  const Pose t = apply_truth(sim, g1, e);
  EXPECT_LT((t.p - sim.p - 0.005 * g1.R.col(0)).norm(), 1e-15);
  EXPECT_LT((t.R - sim.R).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(InjectTruth, ParametersAreRecoverable) {
  Rng rng(2);
  const Pose sim(exp_so3({-0.4, 0.2, 0.1}), Vec3(0.0, 0.1, 0.3));
  const Pose g1 = sim * Pose(oracle::frame_with_axis(Vec3(1, 2, 3).normalized(), 1.0), Vec3(0.01, 0, 0));
  const TruthRanges ranges{0.1, 0.01};
  for (int i = 0; i < 200; ++i) {
    const TruthSample t = inject_truth(sim, g1, ranges, rng);
    const Mat3 turn = t.object_pose.R * sim.R.transpose();
    const Vec3 w = log_so3(turn);
    // Pure turn about the first closing axis.
    EXPECT_LT((w - w.dot(g1.R.col(1)) * g1.R.col(1)).norm(), 1e-12);
    EXPECT_NEAR(w.dot(g1.R.col(1)), t.params.theta, 1e-12);
    const Vec3 dp = t.object_pose.p - sim.p;
    EXPECT_NEAR(dp.dot(g1.R.col(0)), t.params.delta_1, 1e-12);
    EXPECT_NEAR(dp.dot(g1.R.col(2)), t.params.delta_3, 1e-12);
    EXPECT_NEAR(dp.dot(g1.R.col(1)), 0.0, 1e-12);
    EXPECT_LE(std::abs(t.params.theta), ranges.max_theta);
    EXPECT_LE(std::abs(t.params.delta_1), ranges.max_delta);
  }
}

TEST(RotationDifference, WorldFrameDegrees) {
  const Mat3 b = exp_so3({0.3, 0.1, -0.2});
  const Mat3 a = exp_so3({0, 0, 0.01}) * b;
  EXPECT_LT((rotation_difference_deg(a, b) - Vec3(0, 0, 0.01 * 180 / M_PI)).norm(), 1e-12);
}

TEST(AxisStats, SampleStandardDeviation) {
  const auto s = axis_stats({Vec3(1, 0, 5), Vec3(3, 0, 5)});
  EXPECT_EQ(s.mean, Vec3(2, 0, 5));
  EXPECT_NEAR(s.std.x(), std::sqrt(2.0), 1e-15);
  EXPECT_EQ(s.std.y(), 0.0);
  EXPECT_EQ(axis_stats({Vec3(1, 2, 3)}).std, Vec3::Zero());
}

TEST(Experiment, NoiselessTrialsRecoverTruth) {
  TrialConfig c = fixture::experiment();
  c.n_repeats = 10;
  const TrialReport r = run_experiment(c);
  ASSERT_EQ(r.rows.size(), 30u);
  for (const TrialRow& row : r.rows) {
    EXPECT_LT(row.object_dp_mm.cwiseAbs().maxCoeff(), 1e-5) << row.placement << " " << row.repeat;
    EXPECT_LT(row.object_dw_deg.cwiseAbs().maxCoeff(), 1e-5) << row.placement << " " << row.repeat;
    // Injected truth is nonzero, so the conformed grasps did move.
    EXPECT_GT(row.g2_dp_mm.norm() + row.g3_dp_mm.norm(), 1e-3);
  }
  EXPECT_EQ(r.n_groups, 3);
  ASSERT_EQ(r.placements.size(), 3u);
  for (const auto& p : r.placements) EXPECT_TRUE(p.plan.steps.size() == 8u);
}

TEST(Experiment, PositionNoiseStaysSubMillimeter) {
  TrialConfig c = fixture::experiment();
  c.placements.resize(1);
  c.n_repeats = 100;
  c.noise.sigma_p = 0.0001;
  const TrialReport r = run_experiment(c);
  for (int i = 0; i < 3; ++i) EXPECT_LE(r.object.dp_mm.std[i], 0.5) << i;
  // Noise does reach the estimate.
  EXPECT_GT(r.object.dp_mm.std.norm(), 1e-3);
}

TEST(Experiment, CsvIsReproducible) {
  TrialConfig c = fixture::experiment();
  c.n_repeats = 3;
  c.noise = {0.0001, 0.001};
  const std::string a = trials_csv(run_experiment(c));
  const std::string b = trials_csv(run_experiment(c));
  EXPECT_EQ(a, b);
  c.seed = 8;
  EXPECT_NE(a, trials_csv(run_experiment(c)));
}

TEST(Experiment, ThreadCountDoesNotChangeResults) {
  TrialConfig c = fixture::experiment();
  c.n_repeats = 4;
  c.noise = {0.0001, 0.001};
  const std::string one = trials_csv(run_experiment(c));
  c.threads = 3;
  EXPECT_EQ(one, trials_csv(run_experiment(c)));
}

TEST(Experiment, SummaryRecomputedFromCsv) {
  TrialConfig c = fixture::experiment();
  c.n_repeats = 6;
  c.noise = {0.0002, 0.002};
  const TrialReport r = run_experiment(c);
  const auto rows = parse_csv(trials_csv(r));
  ASSERT_EQ(rows.size(), r.rows.size() + 1);
  const auto& header = rows[0];
  auto column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    EXPECT_NE(it, header.end()) << name;
    return static_cast<std::size_t>(it - header.begin());
  };
  const char* axes = "xyz";
  for (int i = 0; i < 3; ++i) {
    oracle::OnePass dp, dw;
    const std::size_t cp = column(std::string("object_dp_") + axes[i]);
    const std::size_t cw = column(std::string("object_dw_") + axes[i]);
    for (std::size_t k = 1; k < rows.size(); ++k) {
      dp.add(std::stod(rows[k][cp]));
      dw.add(std::stod(rows[k][cw]));
    }
    EXPECT_NEAR(dp.mean(), r.object.dp_mm.mean[i], 1e-12);
    EXPECT_NEAR(dp.std(), r.object.dp_mm.std[i], 1e-9 * dp.std() + 1e-15);
    EXPECT_NEAR(dw.mean(), r.object.dw_deg.mean[i], 1e-12);
    EXPECT_NEAR(dw.std(), r.object.dw_deg.std[i], 1e-9 * dw.std() + 1e-15);
  }
}

TEST(Experiment, TracesAreWrittenWhenKept) {
  TrialConfig c = fixture::experiment();
  c.placements.resize(1);
  c.n_repeats = 1;
  c.keep_traces = true;
  const TrialReport r = run_experiment(c);
  ASSERT_FALSE(r.rows[0].g2_trace.empty());
  std::ostringstream out;
  write_traces_csv(r, out);
  const auto rows = parse_csv(out.str());
  EXPECT_EQ(rows[0].size(), 13u);
  EXPECT_EQ(rows.size(), 1 + r.rows[0].g2_trace.size() + r.rows[0].g3_trace.size());
}

TEST(Experiment, ConfigValidation) {
  TrialConfig c = fixture::experiment();
  EXPECT_NO_THROW(c.validate());
  c.ranges.max_delta = 0.030;  // beyond half the opening
  EXPECT_THROW(c.validate(), Error);
  c = fixture::experiment();
  c.n_repeats = 0;
  EXPECT_THROW(c.validate(), Error);
  c = fixture::experiment();
  c.placements.clear();
  EXPECT_THROW(c.validate(), Error);
  c = fixture::experiment();
  c.noise.sigma_p = -1.0;
  EXPECT_THROW(c.validate(), Error);
}

TEST(Experiment, PlanFailureNamesPlacement) {
  TrialConfig c = fixture::experiment();
  c.object_goal = Pose::from_translation({5, 5, 5});
  try {
    (void)run_experiment(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PlanNotFound);
    EXPECT_NE(std::string(e.what()).find("L1"), std::string::npos) << e.what();
  }
}
