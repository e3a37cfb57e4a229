#pragma once

#include <cmath>
#include <numbers>

namespace swarmpath {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2() = default;
  constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  constexpr Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Vec2& operator-=(Vec2 o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  constexpr bool operator==(const Vec2&) const = default;

  constexpr double dot(Vec2 o) const { return x * o.x + y * o.y; }
  constexpr double cross(Vec2 o) const { return x * o.y - y * o.x; }
  constexpr double squared_norm() const { return x * x + y * y; }
  double norm() const { return std::hypot(x, y); }
  double angle() const { return std::atan2(y, x); }

  /// Unit vector, or the zero vector when the input has no length.
  Vec2 normalized() const {
    const double n = norm();
    return n > 0.0 ? Vec2{x / n, y / n} : Vec2{};
  }
  /// Counter-clockwise perpendicular.
  constexpr Vec2 perp() const { return {-y, x}; }
  Vec2 rotated(double a) const {
    const double c = std::cos(a);
    const double s = std::sin(a);
    return {c * x - s * y, s * x + c * y};
  }

  static Vec2 polar(double length, double angle) {
    return {length * std::cos(angle), length * std::sin(angle)};
  }
};

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

/// Axis-aligned rectangle, closed on paper, interior used for occlusion.
struct Rect {
  Vec2 min;
  Vec2 max;

  constexpr bool contains(Vec2 p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
  }
  constexpr bool contains_interior(Vec2 p) const {
    return p.x > min.x && p.x < max.x && p.y > min.y && p.y < max.y;
  }
  constexpr Rect inflated(double r) const {
    return {{min.x - r, min.y - r}, {max.x + r, max.y + r}};
  }
  constexpr Vec2 clamp(Vec2 p) const {
    return {p.x < min.x ? min.x : (p.x > max.x ? max.x : p.x),
            p.y < min.y ? min.y : (p.y > max.y ? max.y : p.y)};
  }
  constexpr double width() const { return max.x - min.x; }
  constexpr double height() const { return max.y - min.y; }
};

struct Disk {
  Vec2 center;
  double radius = 0.0;
};

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  if (a > std::numbers::pi) a -= two_pi;
  return a;
}

constexpr double deg_to_rad(double d) { return d * std::numbers::pi / 180.0; }
constexpr double rad_to_deg(double r) { return r * 180.0 / std::numbers::pi; }

/// Squared distance from a point to the closest point of a rectangle (0 inside).
inline double squared_distance_to_rect(Vec2 p, const Rect& r) {
  return (p - r.clamp(p)).squared_norm();
}

/// True iff the disk overlaps the rectangle with positive area.
inline bool disk_overlaps_rect(Vec2 c, double radius, const Rect& r) {
  return squared_distance_to_rect(c, r) < radius * radius;
}

}  // namespace swarmpath
