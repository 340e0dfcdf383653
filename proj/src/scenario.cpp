#include "uavair/scenario.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "uavair/rng.hpp"

namespace uavair {

namespace {

struct Rect {
  double x0, x1, y0, y1;
};

Point2 draw(Rng& rng, const Rect& r) {
  const double x = rng.uniform(r.x0, r.x1);
  const double y = rng.uniform(r.y0, r.y1);
  return {x, y};
}

}  // namespace

bool inside_area(const Point2& p, double area_side) {
  return p.x >= 0.0 && p.x <= area_side && p.y >= 0.0 && p.y <= area_side;
}

std::vector<std::string> validate(const ScenarioConfig& c) {
  std::vector<std::string> out;
  if (!(c.area_side > 0.0)) out.emplace_back("area_side must be positive");
  if (c.num_users < 1) out.emplace_back("num_users must be at least 1");
  if (c.num_sensors < 1) out.emplace_back("num_sensors must be at least 1");
  if (c.num_slots < 1) out.emplace_back("num_slots must be at least 1");
  if (!(c.uav_altitude > 0.0)) out.emplace_back("uav_altitude must be positive");
  if (!(c.mission_time > 0.0) || !(c.v_max > 0.0)) out.emplace_back("v_max * slot length must be positive");
  if (c.area_side > 0.0) {
    if (!inside_area(c.start, c.area_side)) out.emplace_back("start outside area");
    if (!inside_area(c.end, c.area_side)) out.emplace_back("end outside area");
  }
  if (c.num_slots >= 1 && c.mission_time > 0.0 && c.v_max > 0.0) {
    if (distance(c.start, c.end) > c.num_slots * c.max_step() * (1.0 + 1e-12)) {
      out.emplace_back("destination unreachable");
    }
  }
  return out;
}

std::vector<std::string> validate(const Scenario& s) {
  std::vector<std::string> out = validate(s.config);
  const auto& c = s.config;
  if (static_cast<int>(s.users.size()) != c.num_users) out.emplace_back("user count does not match config");
  if (static_cast<int>(s.sensors.size()) != c.num_sensors) out.emplace_back("sensor count does not match config");
  for (std::size_t m = 0; m < s.users.size(); ++m) {
    if (!inside_area(s.users[m], c.area_side)) out.push_back("user " + std::to_string(m) + " outside area");
  }
  for (std::size_t j = 0; j < s.sensors.size(); ++j) {
    if (!inside_area(s.sensors[j], c.area_side)) out.push_back("sensor " + std::to_string(j) + " outside area");
  }
  return out;
}

Scenario generate_topology(const ScenarioConfig& config) {
  if (auto problems = validate(config); !problems.empty()) {
    std::ostringstream msg;
    msg << "invalid scenario config:";
    for (const auto& p : problems) msg << ' ' << p << ';';
    throw std::invalid_argument(msg.str());
  }

  const double side = config.area_side;
  const Rect whole{0.0, side, 0.0, side};
  Rect user_rect = whole;
  Rect sensor_rect = whole;
  switch (config.topology) {
    case TopologyKind::separated:
      sensor_rect = {0.0, 0.4 * side, 0.0, side};
      user_rect = {0.6 * side, side, 0.0, side};
      break;
    case TopologyKind::mixed: {
      const double half = 0.5 * side / std::sqrt(2.0);
      const double c = 0.5 * side;
      user_rect = sensor_rect = {c - half, c + half, c - half, c + half};
      break;
    }
    case TopologyKind::uniform:
      break;
  }

  Rng rng = Rng::derive(config.seed, "topology");
  Scenario s;
  s.config = config;
  s.users.reserve(config.num_users);
  s.sensors.reserve(config.num_sensors);
  for (int m = 0; m < config.num_users; ++m) s.users.push_back(draw(rng, user_rect));
  for (int j = 0; j < config.num_sensors; ++j) s.sensors.push_back(draw(rng, sensor_rect));
  return s;
}

void to_json(nlohmann::json& j, const Point2& p) { j = nlohmann::json::array({p.x, p.y}); }

void from_json(const nlohmann::json& j, Point2& p) {
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("point must be a two-element array");
  p.x = j.at(0).get<double>();
  p.y = j.at(1).get<double>();
}

void to_json(nlohmann::json& j, const ScenarioConfig& c) {
  j = nlohmann::json{{"area_side", c.area_side},       {"num_users", c.num_users},
                     {"num_sensors", c.num_sensors},   {"uav_altitude", c.uav_altitude},
                     {"v_max", c.v_max},               {"mission_time", c.mission_time},
                     {"num_slots", c.num_slots},       {"start", c.start},
                     {"end", c.end},                   {"topology", c.topology},
                     {"seed", c.seed}};
}

void from_json(const nlohmann::json& j, ScenarioConfig& c) {
  ScenarioConfig d;
  c.area_side = j.value("area_side", d.area_side);
  c.num_users = j.value("num_users", d.num_users);
  c.num_sensors = j.value("num_sensors", d.num_sensors);
  c.uav_altitude = j.value("uav_altitude", d.uav_altitude);
  c.v_max = j.value("v_max", d.v_max);
  c.mission_time = j.value("mission_time", d.mission_time);
  c.num_slots = j.value("num_slots", d.num_slots);
  c.start = j.contains("start") ? j.at("start").get<Point2>() : d.start;
  c.end = j.contains("end") ? j.at("end").get<Point2>() : d.end;
  c.topology = j.value("topology", d.topology);
  c.seed = j.value("seed", d.seed);
}

void to_json(nlohmann::json& j, const Scenario& s) {
  j = nlohmann::json{{"users", s.users}, {"sensors", s.sensors}, {"config", s.config}};
}

void from_json(const nlohmann::json& j, Scenario& s) {
  s.users = j.at("users").get<std::vector<Point2>>();
  s.sensors = j.at("sensors").get<std::vector<Point2>>();
  s.config = j.at("config").get<ScenarioConfig>();
}

}  // namespace uavair
