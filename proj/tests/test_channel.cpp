#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "uavair/channel.hpp"
#include "uavair/rng.hpp"

using namespace uavair;

namespace {

// Independent scalar evaluation of the LoS logistic and the path loss.
double ref_plos(double h, double d, double a, double b) {
  const double theta = std::asin(h / d) * 180.0 / std::numbers::pi;
  return 1.0 / (1.0 + a * std::exp(-b * (theta - a)));
}

double ref_loss(double h, double horiz) {
  const double d = std::sqrt(h * h + horiz * horiz);
  const double p = ref_plos(h, d, 9.613, 0.158);
  return 20.0 * std::log10(4.0 * std::numbers::pi * 2e9 * d / 3e8) + p * 1.0 + (1.0 - p) * 20.0;
}

const Point3 kUav{0.0, 0.0, 100.0};

}  // namespace

TEST(Channel, NoiseConversion) { EXPECT_NEAR(dbm_to_watts(-95.0), std::pow(10.0, -12.5), 1e-27); }

TEST(Channel, LosOverhead) {
  const double p = los_probability(kUav, Point3{0, 0, 0}, ChannelParams{});
  EXPECT_NEAR(p, ref_plos(100.0, 100.0, 9.613, 0.158), 1e-15);
  EXPECT_NEAR(p, 0.99997, 1e-5);
}

TEST(Channel, LosFarFieldLimit) {
  const double p = los_probability(kUav, Point3{1e7, 0, 0}, ChannelParams{});
  const double limit = 1.0 / (1.0 + 9.613 * std::exp(9.613 * 0.158));
  EXPECT_NEAR(limit, 0.0223, 1e-4);
  EXPECT_NEAR(p, limit, 1e-4);
}

TEST(Channel, LosStrictlyInsideUnitInterval) {
  Rng r = Rng::derive(2, "geom");
  for (int i = 0; i < 1000; ++i) {
    const Point3 g{r.uniform(-3000, 3000), r.uniform(-3000, 3000), 0.0};
    const double p = los_probability(kUav, g, ChannelParams{});
    EXPECT_GT(p, 0.0);
    EXPECT_LT(p, 1.0);
  }
}

TEST(Channel, LosIncreasingInElevation) {
  ChannelParams cp;
  double prev = -1.0;
  for (double deg = 0.1; deg < 90.0; deg += 0.1) {
    const double horiz = 100.0 / std::tan(deg * std::numbers::pi / 180.0);
    const double p = los_probability(kUav, Point3{horiz, 0, 0}, cp);
    EXPECT_GT(p, prev) << deg;
    prev = p;
  }
}

TEST(Channel, PathLossOverhead) {
  const double g = path_loss_db(kUav, Point3{0, 0, 0}, ChannelParams{});
  EXPECT_NEAR(g, ref_loss(100.0, 0.0), 1e-12);
  EXPECT_NEAR(g, 79.46, 0.01);
}

TEST(Channel, PureFreeSpaceWhenExcessZero) {
  ChannelParams cp;
  cp.loss_los_db = 0.0;
  cp.loss_nlos_db = 0.0;
  const Point3 g{300, 400, 0};
  const double d = std::sqrt(300.0 * 300 + 400 * 400 + 100 * 100);
  EXPECT_NEAR(path_loss_db(kUav, g, cp), 20.0 * std::log10(4.0 * std::numbers::pi * 2e9 * d / 3e8), 1e-12);
}

TEST(Channel, DoublingDistanceAtFixedAngle) {
  ChannelParams cp;
  cp.loss_los_db = 0.0;
  cp.loss_nlos_db = 0.0;
  const double near = path_loss_db(Point3{0, 0, 100}, Point3{100, 0, 0}, cp);
  const double far = path_loss_db(Point3{0, 0, 200}, Point3{200, 0, 0}, cp);
  EXPECT_NEAR(far - near, 20.0 * std::log10(2.0), 1e-12);
}

TEST(Channel, PathLossNonDecreasingWithHorizontalDistance) {
  ChannelParams cp;
  double prev = -1.0;
  for (int x = 0; x <= 2000; ++x) {
    const double g = path_loss_db(kUav, Point3{double(x), 0, 0}, cp);
    EXPECT_GE(g, prev - 1e-12) << x;
    prev = g;
  }
}

TEST(Channel, AmplitudeConvention) {
  const double amp = amplitude_gain(kUav, Point3{0, 0, 0}, ChannelParams{});
  EXPECT_NEAR(amp, 1.064e-4, 0.001e-4);
  EXPECT_NEAR(amp * amp, 1.13e-8, 0.01e-8);
  Rng r = Rng::derive(4, "geom");
  for (int i = 0; i < 500; ++i) {
    const Point3 g{r.uniform(-2000, 2000), r.uniform(-2000, 2000), 0.0};
    const double a = amplitude_gain(kUav, g, ChannelParams{});
    const double loss = path_loss_db(kUav, g, ChannelParams{});
    EXPECT_NEAR(a * a * std::pow(10.0, loss / 10.0), 1.0, 1e-12);
  }
}

TEST(Channel, ZeroDistanceThrows) {
  EXPECT_THROW(los_probability(kUav, kUav, ChannelParams{}), std::domain_error);
  EXPECT_THROW(path_loss_db(kUav, kUav, ChannelParams{}), std::domain_error);
  EXPECT_THROW(amplitude_gain(kUav, kUav, ChannelParams{}), std::domain_error);
}

TEST(Channel, SnapshotMapsEveryDevice) {
  Scenario s;
  s.config.num_users = 2;
  s.config.num_sensors = 1;
  s.users = {Point2{0, 0}, Point2{500, 0}};
  s.sensors = {Point2{0, 300}};
  const auto c = channel_snapshot(s, kUav, ChannelParams{});
  ASSERT_EQ(c.user_amp.size(), 2u);
  ASSERT_EQ(c.sensor_amp.size(), 1u);
  EXPECT_NEAR(c.user_amp[0], 1.064e-4, 0.001e-4);
  EXPECT_EQ(c.user_amp[1], amplitude_gain(kUav, Point3{500, 0, 0}, ChannelParams{}));
  EXPECT_EQ(c.noise_power, ChannelParams{}.noise_power);

  std::swap(s.users[0], s.users[1]);
  const auto swapped = channel_snapshot(s, kUav, ChannelParams{});
  EXPECT_EQ(swapped.user_amp[0], c.user_amp[1]);
  EXPECT_EQ(swapped.user_amp[1], c.user_amp[0]);
}

TEST(Channel, ApproachingSensorRaisesGain) {
  Scenario s;
  s.config.num_users = 1;
  s.config.num_sensors = 1;
  s.users = {Point2{900, 900}};
  s.sensors = {Point2{500, 500}};
  double prev = 0.0;
  for (int k = 0; k <= 100; ++k) {
    const double t = k / 100.0;
    const Point3 uav{500.0 * t, 500.0 * t, 100.0};
    const double h = channel_snapshot(s, uav, ChannelParams{}).sensor_amp[0];
    EXPECT_GT(h, prev);
    prev = h;
  }
}

TEST(Channel, ParamValidation) {
  EXPECT_TRUE(validate(ChannelParams{}).empty());
  ChannelParams bad;
  bad.loss_los_db = 30.0;
  bad.noise_power = 0.0;
  EXPECT_EQ(validate(bad).size(), 2u);
}
