#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "uavair/baselines.hpp"
#include "uavair/config.hpp"
#include "uavair/harness.hpp"

using namespace uavair;

namespace {

ScenarioConfig small_config() {
  ScenarioConfig c;
  c.area_side = 400.0;
  c.num_users = 4;
  c.num_sensors = 6;
  c.num_slots = 30;
  c.mission_time = 30.0;
  c.end = {400.0, 400.0};
  return c;
}

std::vector<nlohmann::json> read_trace(const std::string& text) {
  std::vector<nlohmann::json> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(nlohmann::json::parse(line));
  return out;
}

Point2 xy(const nlohmann::json& rec) { return {rec.at("xy").at(0).get<double>(), rec.at("xy").at(1).get<double>()}; }

double paper_sum_rate(BaselineKind kind, double gamma) {
  RunConfig cfg = paper_profile();
  cfg.solver.gamma = gamma;
  return run_baseline(kind, generate_topology(cfg.scenario), baseline_setup(cfg)).sum_rate;
}

}  // namespace

TEST(Waypoint, EndpointsAndSpacing) {
  const Point2 a{0.0, 0.0}, b{1000.0, 1000.0};
  EXPECT_EQ(straight_line_waypoint(0, 60, a, b), a);
  EXPECT_EQ(straight_line_waypoint(60, 60, a, b), b);
  const Point2 odd{123.4, 987.6};
  EXPECT_EQ(straight_line_waypoint(7, 7, a, odd), odd);
  for (int n = 1; n <= 60; ++n) {
    const double gap = (straight_line_waypoint(n, 60, a, b) - straight_line_waypoint(n - 1, 60, a, b)).norm();
    EXPECT_NEAR(gap, (b - a).norm() / 60.0, 1e-9);
    EXPECT_LE(gap, 30.0);
  }
  EXPECT_THROW(straight_line_waypoint(61, 60, a, b), std::out_of_range);
  EXPECT_THROW(straight_line_waypoint(-1, 60, a, b), std::out_of_range);
}

TEST(NearestUser, SingleUserAndTies) {
  EXPECT_EQ(nearest_user({5.0, 5.0}, 100.0, {{300.0, 300.0}}, {0}, 0, 10), 0u);
  EXPECT_EQ(nearest_user({50.0, 0.0}, 100.0, {{0.0, 0.0}, {100.0, 0.0}}, {0, 0}, 0, 10), 0u);
  EXPECT_EQ(nearest_user({90.0, 0.0}, 100.0, {{0.0, 0.0}, {100.0, 0.0}}, {0, 0}, 0, 10), 1u);
}

TEST(NearestUser, DeficitForcesAnotherUser) {
  const std::vector<Point2> users{{0.0, 0.0}, {300.0, 0.0}};
  // N = 4, floor 2. After {1, 0} at slot 1, user 0 again still leaves room.
  EXPECT_EQ(nearest_user({0.0, 0.0}, 100.0, users, {1, 0}, 1, 4), 0u);
  // After {2, 0} at slot 2, user 1 needs both remaining slots.
  EXPECT_EQ(nearest_user({0.0, 0.0}, 100.0, users, {2, 0}, 2, 4), 1u);
  EXPECT_EQ(nearest_user({0.0, 0.0}, 100.0, users, {2, 1}, 3, 4), 1u);
  // Out of reach already: plain nearest.
  EXPECT_EQ(nearest_user({0.0, 0.0}, 100.0, users, {3, 0}, 3, 4), 0u);
}

TEST(NearestUser, LedgerSimulationMeetsFloor) {
  const auto sc = generate_topology(small_config());
  std::vector<int> counts(4, 0);
  // Hovering in one corner: the gate alone has to spread the slots.
  for (int n = 0; n < 30; ++n) counts[nearest_user({0.0, 0.0}, 100.0, sc.users, counts, n, 30)] += 1;
  EXPECT_TRUE(fairness_met(counts, 30));
}

TEST(NearestUser, RejectsBadInput) {
  EXPECT_THROW(nearest_user({0.0, 0.0}, 100.0, {}, {}, 0, 4), std::invalid_argument);
  EXPECT_THROW(nearest_user({0.0, 0.0}, 100.0, {{0.0, 0.0}}, {0, 0}, 0, 4), std::invalid_argument);
}

TEST(Kind, NamesRoundTrip) {
  for (auto k : kAllBaselines) EXPECT_EQ(parse_baseline_kind(to_string(k)), k);
  EXPECT_EQ(to_string(BaselineKind::fixed_sensor_power), "fixed_sensor_power");
  EXPECT_THROW(parse_baseline_kind("ddpg"), std::invalid_argument);
}

TEST(RunBaseline, StraightLineEndsAtDestination) {
  const auto c = small_config();
  std::ostringstream trace;
  const auto s = run_baseline(BaselineKind::straight_line_nearest, generate_topology(c), BaselineSetup{}, &trace);
  const auto recs = read_trace(trace.str());
  ASSERT_EQ(recs.size(), 30u);
  EXPECT_EQ(xy(recs.back()), c.end);
  EXPECT_TRUE(s.arrived);
  EXPECT_TRUE(s.fairness);
  EXPECT_EQ(s.slots, 30);
  EXPECT_GT(s.sum_rate, 0.0);
}

TEST(RunBaseline, EveryKindRespectsMobilityAndScheduling) {
  const auto c = small_config();
  const auto scenario = generate_topology(c);
  for (auto kind : kAllBaselines) {
    std::ostringstream trace;
    const auto s = run_baseline(kind, scenario, BaselineSetup{}, &trace);
    const auto recs = read_trace(trace.str());
    ASSERT_EQ(recs.size(), 30u) << to_string(kind);
    Point2 prev = kind == BaselineKind::fixed_position ? Point2{200.0, 200.0} : c.start;
    std::vector<int> counts(4, 0);
    for (const auto& r : recs) {
      const Point2 q = xy(r);
      EXPECT_TRUE(inside_area(q, c.area_side));
      EXPECT_LE((q - prev).norm(), c.max_step() + 1e-9) << to_string(kind);
      counts[r.at("m").get<std::size_t>()] += 1;
      prev = q;
    }
    EXPECT_TRUE(fairness_met(counts, 30)) << to_string(kind);
    EXPECT_TRUE(s.fairness) << to_string(kind);
  }
}

TEST(RunBaseline, PinsAreApplied) {
  const auto c = small_config();
  const auto scenario = generate_topology(c);
  const PowerLimits lim;
  std::ostringstream tu, ts;
  run_baseline(BaselineKind::fixed_user_power, scenario, BaselineSetup{}, &tu);
  run_baseline(BaselineKind::fixed_sensor_power, scenario, BaselineSetup{}, &ts);
  for (const auto& r : read_trace(tu.str())) EXPECT_EQ(r.at("p").get<double>(), lim.p_max);
  for (const auto& r : read_trace(ts.str()))
    for (const auto& b : r.at("b")) EXPECT_EQ(b.get<double>(), std::sqrt(lim.pb_max));
}

TEST(RunBaseline, FixedPositionStaysAtCentroid) {
  std::ostringstream trace;
  run_baseline(BaselineKind::fixed_position, generate_topology(small_config()), BaselineSetup{}, &trace);
  for (const auto& r : read_trace(trace.str())) EXPECT_EQ(xy(r), (Point2{200.0, 200.0}));
}

TEST(RunBaseline, Deterministic) {
  const auto scenario = generate_topology(small_config());
  std::ostringstream a, b;
  run_baseline(BaselineKind::straight_line_nearest, scenario, BaselineSetup{}, &a);
  run_baseline(BaselineKind::straight_line_nearest, scenario, BaselineSetup{}, &b);
  EXPECT_EQ(a.str(), b.str());
}

// Paper-profile scenario. With b pinned the rate of a feasible slot no longer
// depends on the threshold once p reaches p_max.
TEST(FixedSensorPower, SumRatePlateausBetween0015And002) {
  const double lo = paper_sum_rate(BaselineKind::fixed_sensor_power, 0.015);
  const double hi = paper_sum_rate(BaselineKind::fixed_sensor_power, 0.02);
  EXPECT_LT((hi - lo) / std::max(lo, 1e-12), 0.05) << "sum rate " << lo << " -> " << hi;
}

TEST(FixedSensorPower, SumRateFlatOnceEverySlotIsFeasible) {
  const double lo = paper_sum_rate(BaselineKind::fixed_sensor_power, 0.03);
  const double hi = paper_sum_rate(BaselineKind::fixed_sensor_power, 0.05);
  EXPECT_GT(lo, 0.0);
  EXPECT_LT((hi - lo) / lo, 0.05) << "sum rate " << lo << " -> " << hi;
}
