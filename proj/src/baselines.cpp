#include "uavair/baselines.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>

namespace uavair {

std::string to_string(BaselineKind kind) { return nlohmann::json(kind).get<std::string>(); }

BaselineKind parse_baseline_kind(const std::string& name) {
  for (auto k : kAllBaselines)
    if (to_string(k) == name) return k;
  throw std::invalid_argument("unknown baseline kind '" + name + "'");
}

Point2 straight_line_waypoint(int n, int num_slots, const Point2& start, const Point2& end) {
  if (num_slots <= 0 || n < 0 || n > num_slots) throw std::out_of_range("waypoint index out of range");
  const double s = static_cast<double>(n) / num_slots;
  return Point2{std::lerp(start.x, end.x, s), std::lerp(start.y, end.y, s)};
}

std::size_t nearest_user(const Point2& uav_xy, double altitude, const std::vector<Point2>& users,
                         const std::vector<int>& counts, int slot, int num_slots) {
  if (users.empty()) throw std::invalid_argument("no users to schedule");
  if (counts.size() != users.size()) throw std::invalid_argument("fairness ledger size differs from user count");
  const Point3 uav = Point3::aerial(uav_xy, altitude);

  auto pick = [&](bool gated) -> std::optional<std::size_t> {
    std::optional<std::size_t> best;
    double best_d = 0.0;
    std::vector<int> trial = counts;
    for (std::size_t m = 0; m < users.size(); ++m) {
      if (gated) {
        trial[m] += 1;
        const bool ok = fairness_attainable(trial, slot + 1, num_slots);
        trial[m] -= 1;
        if (!ok) continue;
      }
      const double d = distance(uav, Point3::ground(users[m]));
      if (!best || d < best_d) {
        best = m;
        best_d = d;
      }
    }
    return best;
  };
  if (auto m = pick(true)) return *m;
  return *pick(false);
}

EpisodeSummary run_baseline(BaselineKind kind, const Scenario& scenario, const BaselineSetup& setup,
                            std::ostream* trace) {
  const auto& sc = scenario.config;
  PowerPins pins;
  if (kind == BaselineKind::fixed_user_power) pins.user_power = setup.limits.p_max;
  if (kind == BaselineKind::fixed_sensor_power)
    pins.sensor_coeffs = std::vector<double>(scenario.sensors.size(), std::sqrt(setup.limits.pb_max));

  Environment env(scenario, setup.channel, setup.limits, setup.solver, setup.reward, pins);
  const Point2 centroid{0.5 * sc.area_side, 0.5 * sc.area_side};
  if (kind == BaselineKind::fixed_position) env.place(centroid);

  EpisodeSummary sum;
  while (!env.done()) {
    const auto& s = env.state();
    const Point2 target =
        kind == BaselineKind::fixed_position ? centroid : straight_line_waypoint(s.slot + 1, sc.num_slots, sc.start, sc.end);
    const auto user = nearest_user(target, sc.uav_altitude, scenario.users, s.sched_counts, s.slot, sc.num_slots);
    const auto out = env.step_to(target, user);
    accumulate(sum, out);
    if (trace) write_trace_line(*trace, out);
  }
  finalize(sum, env.state(), sc);
  return sum;
}

}  // namespace uavair
