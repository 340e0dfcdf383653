#include "uavair/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace uavair {

std::vector<std::string> validate(const ChannelParams& p) {
  std::vector<std::string> out;
  if (!(p.carrier_freq > 0.0)) out.emplace_back("carrier_freq must be positive");
  if (!(p.light_speed > 0.0)) out.emplace_back("light_speed must be positive");
  if (!(p.env_a > 0.0)) out.emplace_back("env_a must be positive");
  if (!(p.env_b > 0.0)) out.emplace_back("env_b must be positive");
  if (!(p.loss_los_db >= 0.0)) out.emplace_back("loss_los_db must be non-negative");
  if (!(p.loss_nlos_db >= p.loss_los_db)) out.emplace_back("loss_nlos_db must be at least loss_los_db");
  if (!(p.noise_power > 0.0)) out.emplace_back("noise_power must be positive");
  return out;
}

namespace {

double checked_distance(const Point3& uav, const Point3& ground) {
  const double d = distance(uav, ground);
  if (!(d > 0.0)) throw std::domain_error("channel: UAV and ground device coincide");
  return d;
}

}  // namespace

double los_probability(const Point3& uav, const Point3& ground, const ChannelParams& params) {
  const double d = checked_distance(uav, ground);
  const double height = uav.z - ground.z;
  const double elevation_deg = 180.0 / std::numbers::pi * std::asin(height / d);
  return 1.0 / (1.0 + params.env_a * std::exp(-params.env_b * (elevation_deg - params.env_a)));
}

double path_loss_db(const Point3& uav, const Point3& ground, const ChannelParams& params) {
  const double d = checked_distance(uav, ground);
  const double free_space = 20.0 * std::log10(4.0 * std::numbers::pi * params.carrier_freq / params.light_speed * d);
  const double p_los = los_probability(uav, ground, params);
  return free_space + p_los * params.loss_los_db + (1.0 - p_los) * params.loss_nlos_db;
}

double amplitude_gain(const Point3& uav, const Point3& ground, const ChannelParams& params) {
  return std::pow(10.0, -path_loss_db(uav, ground, params) / 20.0);
}

ChannelState channel_snapshot(const Scenario& scenario, const Point3& uav, const ChannelParams& params) {
  ChannelState s;
  s.noise_power = params.noise_power;
  s.user_amp.reserve(scenario.users.size());
  s.sensor_amp.reserve(scenario.sensors.size());
  for (const auto& u : scenario.users) s.user_amp.push_back(amplitude_gain(uav, Point3::ground(u), params));
  for (const auto& v : scenario.sensors) s.sensor_amp.push_back(amplitude_gain(uav, Point3::ground(v), params));
  return s;
}

}  // namespace uavair
