#include "uavair/phy.hpp"

#include <cmath>
#include <stdexcept>

namespace uavair {

double user_received_power(const ChannelState& chan, double user_power, std::optional<std::size_t> scheduled) {
  if (!scheduled) return 0.0;
  if (*scheduled >= chan.user_amp.size()) throw std::out_of_range("scheduled user index out of range");
  const double g = chan.user_amp[*scheduled];
  return g * g * user_power;
}

double aircomp_mse(const ChannelState& chan, const SlotDecision& dec) {
  const std::size_t num_sensors = chan.sensor_amp.size();
  if (dec.sensor_coeffs.size() != num_sensors) throw std::invalid_argument("aircomp_mse: coefficient count mismatch");
  double residual = 0.0;
  for (std::size_t j = 0; j < num_sensors; ++j) {
    const double e = dec.eta * dec.sensor_coeffs[j] * chan.sensor_amp[j] - 1.0;
    residual += e * e;
  }
  const double disturbance = user_received_power(chan, dec.user_power, dec.scheduled) + chan.noise_power;
  const double j2 = static_cast<double>(num_sensors) * static_cast<double>(num_sensors);
  return (residual + dec.eta * dec.eta * disturbance) / j2;
}

double user_rate(const ChannelState& chan, const SlotDecision& dec) {
  if (!dec.scheduled || dec.eta <= 0.0 || dec.user_power <= 0.0) return 0.0;
  if (dec.sensor_coeffs.size() != chan.sensor_amp.size()) throw std::invalid_argument("user_rate: coefficient count mismatch");
  double interference = chan.noise_power;
  for (std::size_t j = 0; j < chan.sensor_amp.size(); ++j) {
    const double c = dec.sensor_coeffs[j] * chan.sensor_amp[j];
    interference += c * c;
  }
  return std::log2(1.0 + user_received_power(chan, dec.user_power, dec.scheduled) / interference);
}

double optimal_eta(const ChannelState& chan, double user_power, std::span<const double> sensor_coeffs,
                   std::optional<std::size_t> scheduled) {
  if (sensor_coeffs.size() != chan.sensor_amp.size()) throw std::invalid_argument("optimal_eta: coefficient count mismatch");
  double linear = 0.0;
  double quadratic = 0.0;
  for (std::size_t j = 0; j < sensor_coeffs.size(); ++j) {
    const double c = std::abs(sensor_coeffs[j] * chan.sensor_amp[j]);
    linear += c;
    quadratic += c * c;
  }
  if (linear == 0.0) return 0.0;
  return linear / (quadratic + user_received_power(chan, user_power, scheduled) + chan.noise_power);
}

}  // namespace uavair
