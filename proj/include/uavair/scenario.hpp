#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "uavair/geometry.hpp"

namespace uavair {

enum class TopologyKind { separated, mixed, uniform };

NLOHMANN_JSON_SERIALIZE_ENUM(TopologyKind, {
                                               {TopologyKind::separated, "separated"},
                                               {TopologyKind::mixed, "mixed"},
                                               {TopologyKind::uniform, "uniform"},
                                           })

/// Static description of a mission area and its timing. Lengths in meters,
/// times in seconds.
struct ScenarioConfig {
  double area_side = 1000.0;
  int num_users = 15;
  int num_sensors = 36;
  double uav_altitude = 100.0;
  double v_max = 30.0;
  double mission_time = 60.0;
  int num_slots = 60;
  Point2 start{0.0, 0.0};
  Point2 end{1000.0, 1000.0};
  TopologyKind topology = TopologyKind::uniform;
  std::uint64_t seed = 1;

  double slot_length() const { return mission_time / num_slots; }
  /// Largest displacement allowed between consecutive waypoints.
  double max_step() const { return v_max * slot_length(); }
};

struct Scenario {
  std::vector<Point2> users;
  std::vector<Point2> sensors;
  ScenarioConfig config;
};

/// One message per violated invariant; empty when the config is usable.
std::vector<std::string> validate(const ScenarioConfig& config);
std::vector<std::string> validate(const Scenario& scenario);

/// Draws user and sensor positions. Pure function of `config` (the seed is
/// part of it). Throws std::invalid_argument listing every violation when the
/// config is invalid.
///
///   separated: sensors in [0, 0.4 L] x [0, L], users in [0.6 L, L] x [0, L]
///   mixed:     both in the centered square of side L / sqrt(2) (half the area)
///   uniform:   both over the whole square
Scenario generate_topology(const ScenarioConfig& config);

bool inside_area(const Point2& p, double area_side);

void to_json(nlohmann::json& j, const Point2& p);
void from_json(const nlohmann::json& j, Point2& p);
void to_json(nlohmann::json& j, const ScenarioConfig& c);
void from_json(const nlohmann::json& j, ScenarioConfig& c);
void to_json(nlohmann::json& j, const Scenario& s);
void from_json(const nlohmann::json& j, Scenario& s);

}  // namespace uavair
