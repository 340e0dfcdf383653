#include <gtest/gtest.h>

#include <cmath>

#include "uavair/phy.hpp"
#include "uavair/rng.hpp"

using namespace uavair;

namespace {

ChannelState random_channel(Rng& r, std::size_t j, std::size_t m = 1) {
  ChannelState c;
  for (std::size_t k = 0; k < m; ++k) c.user_amp.push_back(std::pow(10.0, r.uniform(-6.0, -3.0)));
  for (std::size_t k = 0; k < j; ++k) c.sensor_amp.push_back(std::pow(10.0, r.uniform(-6.0, -3.0)));
  c.noise_power = std::pow(10.0, r.uniform(-14.0, -10.0));
  return c;
}

SlotDecision random_decision(Rng& r, const ChannelState& c) {
  SlotDecision d;
  d.scheduled = 0;
  d.user_power = r.uniform(0.0, 0.2);
  for (std::size_t k = 0; k < c.sensor_amp.size(); ++k) d.sensor_coeffs.push_back(r.uniform(0.0, std::sqrt(0.05)));
  d.eta = optimal_eta(c, d.user_power, d.sensor_coeffs, d.scheduled);
  return d;
}

}  // namespace

TEST(Phy, MseAtZeroEtaIsOneOverJ) {
  Rng r = Rng::derive(1, "phy");
  for (int i = 0; i < 1000; ++i) {
    const std::size_t j = 1 + r.index(40);
    const auto c = random_channel(r, j);
    auto d = random_decision(r, c);
    d.eta = 0.0;
    EXPECT_NEAR(aircomp_mse(c, d), 1.0 / static_cast<double>(j), 1e-15);
  }
}

TEST(Phy, MseHandExample) {
  ChannelState c{{}, {1.0, 1.0}, 0.1};
  SlotDecision d{std::nullopt, 0.0, {1.0, 1.0}, 1.0};
  EXPECT_NEAR(aircomp_mse(c, d), 0.025, 1e-15);
}

TEST(Phy, SingleSensorOptimum) {
  ChannelState c{{}, {1.0}, 0.1};
  const std::vector<double> b{1.0};
  const double eta = optimal_eta(c, 0.0, b, std::nullopt);
  EXPECT_NEAR(eta, 1.0 / 1.1, 1e-15);
  SlotDecision d{std::nullopt, 0.0, b, eta};
  EXPECT_NEAR(aircomp_mse(c, d), 0.1 / 1.1, 1e-15);
}

TEST(Phy, RateExamples) {
  ChannelState c{{1.0}, {std::sqrt(0.5)}, 0.5};
  SlotDecision d{0, 1.0, {1.0}, 1.0};
  EXPECT_NEAR(user_rate(c, d), 1.0, 1e-15);
  d.user_power = 0.0;
  EXPECT_EQ(user_rate(c, d), 0.0);
  d.user_power = 1.0;
  d.eta = 0.0;
  EXPECT_EQ(user_rate(c, d), 0.0);
  d.eta = 1.0;
  d.scheduled.reset();
  EXPECT_EQ(user_rate(c, d), 0.0);
}

TEST(Phy, UserTermOnlyWhenScheduled) {
  ChannelState c{{1.0}, {1.0}, 0.0};
  SlotDecision d{std::nullopt, 1.0, {1.0}, 1.0};
  EXPECT_EQ(aircomp_mse(c, d), 0.0);
  d.scheduled = 0;
  EXPECT_EQ(aircomp_mse(c, d), 1.0);
}

TEST(Phy, OptimalEtaZeroWithoutSensors) {
  ChannelState c{{1e-4}, {1e-4, 2e-4}, 1e-12};
  const std::vector<double> b{0.0, 0.0};
  EXPECT_EQ(optimal_eta(c, 0.1, b, 0), 0.0);
}

TEST(Phy, RateInvariantUnderEtaScaling) {
  Rng r = Rng::derive(2, "phy");
  for (int i = 0; i < 1000; ++i) {
    const auto c = random_channel(r, 1 + r.index(10));
    auto d = random_decision(r, c);
    const double base = user_rate(c, d);
    for (double k : {0.1, 1.0, 10.0}) {
      auto e = d;
      e.eta = d.eta * k;
      EXPECT_NEAR(user_rate(c, e), base, 1e-12 * std::max(base, 1e-300));
    }
  }
}

TEST(Phy, OptimalEtaIsStationaryAndGlobal) {
  Rng r = Rng::derive(3, "phy");
  for (int i = 0; i < 1000; ++i) {
    const auto c = random_channel(r, 1 + r.index(10));
    auto d = random_decision(r, c);
    const double eta = d.eta;
    auto mse_at = [&](double e) {
      auto x = d;
      x.eta = e;
      return aircomp_mse(c, x);
    };
    // Relative sensitivity eta * MSE'(eta) / MSE; central differences are exact
    // on a quadratic, so only rounding remains.
    const double h = 1e-3 * eta;
    const double slope = (mse_at(eta + h) - mse_at(eta - h)) / (2.0 * h);
    EXPECT_LE(std::abs(slope * eta / mse_at(eta)), 1e-8);
    const double best = mse_at(eta);
    for (int k = 0; k < 100; ++k) EXPECT_LE(best, mse_at(r.uniform(0.0, 3.0 * eta)) + 1e-15);
  }
}

TEST(Phy, MseConvexInEta) {
  Rng r = Rng::derive(4, "phy");
  const auto c = random_channel(r, 5);
  auto d = random_decision(r, c);
  const double step = d.eta / 50.0;
  std::vector<double> vals;
  for (int k = 0; k < 200; ++k) {
    d.eta = k * step;
    vals.push_back(aircomp_mse(c, d));
  }
  for (std::size_t k = 1; k + 1 < vals.size(); ++k) EXPECT_GE(vals[k - 1] - 2 * vals[k] + vals[k + 1], -1e-15);
}
