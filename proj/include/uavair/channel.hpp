#pragma once

#include <string>
#include <vector>

#include "uavair/geometry.hpp"
#include "uavair/scenario.hpp"

namespace uavair {

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

/// Probabilistic line-of-sight air-to-ground model parameters.
struct ChannelParams {
  double carrier_freq = 2e9;    // Hz
  double light_speed = 3e8;     // m/s
  double env_a = 9.613;
  double env_b = 0.158;
  double loss_los_db = 1.0;
  double loss_nlos_db = 20.0;
  double noise_power = dbm_to_watts(-95.0);  // W
};

std::vector<std::string> validate(const ChannelParams& params);

/// Linear amplitude gains for one UAV position. Squared entries are power gains.
struct ChannelState {
  std::vector<double> user_amp;
  std::vector<double> sensor_amp;
  double noise_power = 0.0;
};

/// LoS probability from the elevation angle (in degrees) seen by `ground`.
/// Throws std::domain_error when the two points coincide.
double los_probability(const Point3& uav, const Point3& ground, const ChannelParams& params);

/// Free-space loss at the 3D distance plus the LoS-weighted excess loss, in dB.
double path_loss_db(const Point3& uav, const Point3& ground, const ChannelParams& params);

/// 10^(-G/20): the amplitude whose square is the linear power gain.
double amplitude_gain(const Point3& uav, const Point3& ground, const ChannelParams& params);

ChannelState channel_snapshot(const Scenario& scenario, const Point3& uav, const ChannelParams& params);

}  // namespace uavair
