#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "uavair/channel.hpp"

namespace uavair {

struct PowerLimits {
  double p_max = 0.2;    // user transmit power bound, W
  double pb_max = 0.05;  // bound on |b_j|^2 for every sensor, W
};

/// Control tuple of one slot. Sensor coefficients are real, non-negative
/// amplitudes; `scheduled` empty means no user transmits.
struct SlotDecision {
  std::optional<std::size_t> scheduled;
  double user_power = 0.0;
  std::vector<double> sensor_coeffs;
  double eta = 0.0;
};

/// AirComp mean-squared error of the averaged sensor data:
/// (1/J^2) [ sum_j (eta b_j h_j - 1)^2 + eta^2 (g_m^2 p + sigma^2) ].
double aircomp_mse(const ChannelState& chan, const SlotDecision& dec);

/// Uplink rate of the scheduled user in bits/s/Hz. AirComp signals and noise
/// are interference. eta cancels, so the value only depends on (p, b); eta = 0
/// and "no user" both give 0.
double user_rate(const ChannelState& chan, const SlotDecision& dec);

/// MSE-minimizing receive normalizing factor for fixed powers.
/// Returns 0 when every b_j is 0.
double optimal_eta(const ChannelState& chan, double user_power, std::span<const double> sensor_coeffs,
                   std::optional<std::size_t> scheduled);

/// g_m^2 p, or 0 when no user is scheduled.
double user_received_power(const ChannelState& chan, double user_power, std::optional<std::size_t> scheduled);

}  // namespace uavair
