#pragma once

#include <cmath>

namespace uavair {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
  Point2 operator+(const Point2& o) const { return {x + o.x, y + o.y}; }
  Point2 operator-(const Point2& o) const { return {x - o.x, y - o.y}; }
  Point2 operator*(double s) const { return {x * s, y * s}; }
  double norm() const { return std::hypot(x, y); }
};

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  static Point3 ground(const Point2& p) { return {p.x, p.y, 0.0}; }
  static Point3 aerial(const Point2& p, double altitude) { return {p.x, p.y, altitude}; }
};

inline double distance(const Point2& a, const Point2& b) { return (a - b).norm(); }

inline double distance(const Point3& a, const Point3& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

}  // namespace uavair
