#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "uavair/env.hpp"

namespace uavair {

enum class BaselineKind { straight_line_nearest, fixed_user_power, fixed_sensor_power, fixed_position };

NLOHMANN_JSON_SERIALIZE_ENUM(BaselineKind, {
                                               {BaselineKind::straight_line_nearest, "straight_line_nearest"},
                                               {BaselineKind::fixed_user_power, "fixed_user_power"},
                                               {BaselineKind::fixed_sensor_power, "fixed_sensor_power"},
                                               {BaselineKind::fixed_position, "fixed_position"},
                                           })

inline constexpr BaselineKind kAllBaselines[] = {BaselineKind::straight_line_nearest, BaselineKind::fixed_user_power,
                                                 BaselineKind::fixed_sensor_power, BaselineKind::fixed_position};

std::string to_string(BaselineKind kind);
/// Throws std::invalid_argument for unknown names.
BaselineKind parse_baseline_kind(const std::string& name);

/// Linear interpolation from start to end; n = N returns `end` exactly.
Point2 straight_line_waypoint(int n, int num_slots, const Point2& start, const Point2& end);

/// Closest user (3D distance from the UAV at `altitude`) among those whose
/// selection keeps the fairness floor reachable; ties go to the lowest index.
/// `slot` counts completed slots. Falls back to the unrestricted nearest user
/// when fairness is already out of reach.
std::size_t nearest_user(const Point2& uav_xy, double altitude, const std::vector<Point2>& users,
                         const std::vector<int>& counts, int slot, int num_slots);

struct BaselineSetup {
  ChannelParams channel;
  PowerLimits limits;
  SolverConfig solver;
  RewardConfig reward;
};

/// Runs one N-slot episode. Appends one JSON line per slot to `trace` when given.
EpisodeSummary run_baseline(BaselineKind kind, const Scenario& scenario, const BaselineSetup& setup,
                            std::ostream* trace = nullptr);

}  // namespace uavair
