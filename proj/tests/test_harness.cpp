#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "uavair/harness.hpp"

using namespace uavair;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("uavair_test_harness_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

// Desk scenario, a few short episodes with small batches so updates start early.
RunConfig quick_config() {
  RunConfig c = desk_profile();
  c.episodes = 3;
  c.eval_episodes = 2;
  c.warmup_steps = 20;
  c.sac.batch_size = 16;
  c.sac.hidden = {8, 8};
  c.seed = 7;
  return c;
}

}  // namespace

TEST(Config, PaperProfileDefaults) {
  const RunConfig c = load_run_config(nlohmann::json::object());
  EXPECT_EQ(c.sac.gamma, 0.90);
  EXPECT_EQ(c.sac.batch_size, 64u);
  EXPECT_EQ(c.sac.lr_q, 1e-4);
  EXPECT_EQ(c.sac.lr_pi, 1e-4);
  EXPECT_EQ(c.solver.tol, 0.001);
  EXPECT_EQ(c.solver.gamma, 0.015);
  EXPECT_EQ(c.channel.noise_power, std::pow(10.0, -12.5));
  EXPECT_EQ(c.scenario.uav_altitude, 100.0);
  EXPECT_EQ(c.scenario.v_max, 30.0);
  EXPECT_EQ(c.scenario.mission_time, 60.0);
  EXPECT_EQ(c.scenario.slot_length(), 1.0);
  EXPECT_EQ(c.limits.p_max, 0.2);
  EXPECT_EQ(c.limits.pb_max, 0.05);
  EXPECT_EQ(c.channel.carrier_freq, 2e9);
  EXPECT_EQ(c.channel.env_a, 9.613);
  EXPECT_EQ(c.channel.env_b, 0.158);
  EXPECT_EQ(c.channel.loss_los_db, 1.0);
  EXPECT_EQ(c.channel.loss_nlos_db, 20.0);
  EXPECT_EQ(c.scenario.num_users, 15);
  EXPECT_EQ(c.scenario.num_sensors, 36);
  EXPECT_EQ(c.scenario.num_slots, 60);
  EXPECT_EQ(c.episodes, 4000);
}

TEST(Config, NoiseInDbmIsConvertedAtLoad) {
  const auto c = load_run_config(nlohmann::json{{"channel", {{"noise_dbm", -95.0}}}});
  EXPECT_EQ(c.channel.noise_power, std::pow(10.0, -12.5));
  const auto d = load_run_config(nlohmann::json{{"channel", {{"noise_dbm", -80.0}}}});
  EXPECT_NEAR(d.channel.noise_power, 1e-11, 1e-25);
  EXPECT_THROW(load_run_config(nlohmann::json{{"channel", {{"noise_dbm", -95.0}, {"noise_power", 1e-12}}}}),
               std::invalid_argument);
}

TEST(Config, PartialSectionsKeepProfileDefaults) {
  const auto c = load_run_config(nlohmann::json{{"profile", "desk"}, {"scenario", {{"seed", 9}}}, {"sac", {{"lr_q", 3e-4}}}});
  EXPECT_EQ(c.scenario.seed, 9u);
  EXPECT_EQ(c.scenario.num_users, 4);
  EXPECT_EQ(c.scenario.num_slots, 30);
  EXPECT_EQ(c.sac.lr_q, 3e-4);
  EXPECT_EQ(c.sac.lr_pi, desk_profile().sac.lr_pi);
  EXPECT_EQ(c.episodes, 2000);
}

TEST(Config, RejectsInvalidValues) {
  EXPECT_THROW(load_run_config(nlohmann::json{{"profile", "laptop"}}), std::invalid_argument);
  EXPECT_THROW(load_run_config(nlohmann::json{{"solver", {{"gamma", 0.0}}}}), std::invalid_argument);
  EXPECT_THROW(load_run_config(nlohmann::json{{"sac", {{"gamma", 1.0}}}}), std::invalid_argument);
  EXPECT_THROW(load_run_config(nlohmann::json{{"scenario", {{"num_users", 0}}}}), std::invalid_argument);
  EXPECT_THROW(load_run_config(nlohmann::json{{"episodes", -1}}), std::invalid_argument);
}

TEST(Config, SerializedConfigLoadsBack) {
  RunConfig c = desk_profile();
  c.seed = 42;
  c.solver.gamma = 0.02;
  c.reward.count_scale = CountScale::horizon;
  const auto back = load_run_config(run_config_json(c));
  EXPECT_EQ(run_config_json(back), run_config_json(c));
}

TEST(Metrics, RowFormat) {
  EpisodeSummary s;
  s.total_return = -1.5;
  s.sum_rate = 0.1;
  s.mse_violations = 2;
  s.fairness = true;
  EXPECT_EQ(metrics_header(), "episode,return,sum_rate,mse_violations,fairness,arrived,status");
  EXPECT_EQ(metrics_row(3, s), "3,-1.5,0.1,2,1,0,ok");
  EXPECT_EQ(metrics_row(4, s, true), "4,-1.5,0.1,2,1,0,aborted");
  EXPECT_EQ(std::stod(format_double(0.1 + 0.2)), 0.1 + 0.2);
}

TEST(Train, WritesDeterministicMetricsAndCheckpoint) {
  const auto cfg = quick_config();
  const auto a = scratch_dir("det_a"), b = scratch_dir("det_b");
  const auto ra = train(cfg, a);
  train(cfg, b);
  const auto ma = slurp(a / "metrics.csv");
  EXPECT_EQ(ma, slurp(b / "metrics.csv"));
  EXPECT_EQ(slurp(a / "checkpoint.json"), slurp(b / "checkpoint.json"));
  const auto rows = lines(ma);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0], metrics_header());
  EXPECT_EQ(rows[1].substr(0, 2), "1,");
  EXPECT_EQ(lines(slurp(a / "timing.csv")).size(), 4u);
  EXPECT_EQ(ra.episodes.size(), 3u);
  EXPECT_TRUE(ra.agent.ready());

  auto other = cfg;
  other.seed = 8;
  const auto c = scratch_dir("det_c");
  train(other, c);
  EXPECT_NE(slurp(c / "metrics.csv"), ma);
}

TEST(Train, AbortKeepsOneRowPerEpisode) {
  auto cfg = quick_config();
  cfg.episodes = 4;
  cfg.sac.lr_q = 1e300;  // the first critic step blows the weights up
  const auto dir = scratch_dir("abort");
  try {
    train(cfg, dir);
    FAIL() << "expected training to abort";
  } catch (const std::runtime_error& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("episode "), std::string::npos) << msg;
    EXPECT_NE(msg.find("slot "), std::string::npos) << msg;
    EXPECT_NE(msg.find("non-finite"), std::string::npos) << msg;
  }
  const auto rows = lines(slurp(dir / "metrics.csv"));
  ASSERT_GE(rows.size(), 2u);
  const auto& last = rows.back();
  EXPECT_EQ(last.substr(last.size() - 7), "aborted");
  EXPECT_EQ(last.substr(0, last.find(',')), std::to_string(rows.size() - 1));
  for (std::size_t i = 1; i + 1 < rows.size(); ++i) EXPECT_EQ(rows[i].substr(rows[i].size() - 2), "ok");
  EXPECT_FALSE(fs::exists(dir / "checkpoint.json"));
}

TEST(Evaluate, GreedyRolloutsRepeatAndRoundTripThroughCheckpoint) {
  const auto cfg = quick_config();
  const auto dir = scratch_dir("eval");
  const auto res = train(cfg, dir);
  std::ostringstream t1, t2, t3;
  const auto r1 = evaluate(res.agent, res.scenario, cfg, 2, &t1);
  const auto r2 = evaluate(res.agent, res.scenario, cfg, 2, &t2);
  EXPECT_EQ(t1.str(), t2.str());
  EXPECT_EQ(lines(t1.str()).size(), 60u);
  const auto half = lines(t1.str());
  EXPECT_TRUE(std::equal(half.begin(), half.begin() + 30, half.begin() + 30));
  EXPECT_EQ(r1.mean_sum_rate, r2.mean_sum_rate);
  for (double v : {r1.mean_sum_rate, r1.mean_return, r1.arrival_pct, r1.fairness_pct}) EXPECT_TRUE(std::isfinite(v));
  EXPECT_EQ(r1.episodes.size(), 2u);

  const auto ck = load_checkpoint(dir / "checkpoint.json");
  EXPECT_EQ(run_config_json(ck.config), run_config_json(cfg));
  evaluate(ck.agent, ck.scenario, ck.config, 2, &t3);
  EXPECT_EQ(t3.str(), t1.str());
}

TEST(Evaluate, RejectsScenarioWithOtherUserCount) {
  const auto cfg = quick_config();
  SacAgent agent(8, 6, cfg.sac, 1);
  auto sc = cfg.scenario;
  sc.num_users = 5;
  EXPECT_THROW(evaluate(agent, generate_topology(sc), cfg, 1), std::invalid_argument);
}

TEST(Summarize, Percentages) {
  std::vector<EpisodeSummary> eps(4);
  eps[0].arrived = eps[1].arrived = eps[2].arrived = true;
  eps[0].fairness = true;
  eps[0].sum_rate = 4.0;
  const auto r = summarize(eps);
  EXPECT_DOUBLE_EQ(r.arrival_pct, 75.0);
  EXPECT_DOUBLE_EQ(r.fairness_pct, 25.0);
  EXPECT_DOUBLE_EQ(r.mean_sum_rate, 1.0);
}

TEST(Sweep, BaselineRowsPerThresholdAndCsvRoundTrip) {
  const auto cfg = desk_profile();
  const std::vector<double> gammas{0.005, 0.01, 0.015, 0.02};
  SweepOptions opts;
  opts.baselines = {BaselineKind::straight_line_nearest, BaselineKind::fixed_position};
  const auto rows = sweep(cfg, gammas, opts);
  ASSERT_EQ(rows.size(), 8u);
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    EXPECT_EQ(rows[2 * i].gamma, gammas[i]);
    EXPECT_EQ(rows[2 * i].method, "straight_line_nearest");
    EXPECT_EQ(rows[2 * i + 1].method, "fixed_position");
    if (i > 0) EXPECT_GE(rows[2 * i].sum_rate - rows[2 * i - 2].sum_rate, -1e-6) << "gamma " << gammas[i];
  }
  std::stringstream csv;
  write_sweep_csv(csv, rows);
  EXPECT_EQ(read_sweep_csv(csv), rows);

  EXPECT_THROW(sweep(cfg, std::vector<double>{0.01}, opts), std::invalid_argument);
  std::istringstream bad("gamma,method\n");
  EXPECT_THROW(read_sweep_csv(bad), std::invalid_argument);
}
