// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

namespace fracsim {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator/(double s) const { return {x / s, y / s}; }
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& a) { return std::sqrt(dot(a, a)); }
inline double dist(const Vec2& a, const Vec2& b) { return norm(a - b); }

/// Perpendicular pointing to the right of the direction a->b.
inline Vec2 right_normal(const Vec2& a, const Vec2& b) {
  Vec2 d = b - a;
  double len = norm(d);
  return {d.y / len, -d.x / len};
}

/// Twice the signed area of triangle (a,b,c); > 0 for counterclockwise.
/// Falls back to long double when the double result is ambiguous.
inline double orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double det = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
  const double mag = std::abs((b.x - a.x) * (c.y - a.y)) + std::abs((b.y - a.y) * (c.x - a.x));
  if (std::abs(det) > 1e-12 * (mag + 1e-300)) return det;
  const long double detl = (static_cast<long double>(b.x) - a.x) * (static_cast<long double>(c.y) - a.y) -
                           (static_cast<long double>(b.y) - a.y) * (static_cast<long double>(c.x) - a.x);
  return static_cast<double>(detl);
}

/// Positive when d lies inside the circumcircle of CCW triangle (a,b,c).
inline double incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const long double adx = a.x - d.x, ady = a.y - d.y;
  const long double bdx = b.x - d.x, bdy = b.y - d.y;
  const long double cdx = c.x - d.x, cdy = c.y - d.y;
  const long double ad2 = adx * adx + ady * ady;
  const long double bd2 = bdx * bdx + bdy * bdy;
  const long double cd2 = cdx * cdx + cdy * cdy;
  const long double det = adx * (bdy * cd2 - cdy * bd2) - ady * (bdx * cd2 - cdx * bd2) + ad2 * (bdx * cdy - cdx * bdy);
  return static_cast<double>(det);
}

inline double triangle_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * orient2d(a, b, c);
}

/// Distance from point p to segment [a,b].
inline double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  Vec2 d = b - a;
  double len2 = dot(d, d);
  if (len2 == 0.0) return dist(p, a);
  double t = dot(p - a, d) / len2;
  t = std::fmin(1.0, std::fmax(0.0, t));
  return dist(p, a + d * t);
}

/// Intersection of segments [a0,a1] and [b0,b1], including endpoint touches.
/// Returns the parameter pair (t on a, s on b) when the segments meet at a
/// single point; collinear overlaps are reported via the thrown exception.
inline std::optional<std::pair<double, double>> segment_intersection(const Vec2& a0, const Vec2& a1, const Vec2& b0,
                                                                     const Vec2& b1, double tol = 1e-12) {
  Vec2 da = a1 - a0, db = b1 - b0;
  double denom = cross(da, db);
  double scale = norm(da) * norm(db);
  if (std::abs(denom) <= tol * scale) {
    // parallel: either disjoint or collinear
    if (std::abs(cross(b0 - a0, da)) > tol * (norm(da) * (norm(b0 - a0) + 1.0))) return std::nullopt;
    double len2 = dot(da, da);
    double t0 = dot(b0 - a0, da) / len2;
    double t1 = dot(b1 - a0, da) / len2;
    double lo = std::fmin(t0, t1), hi = std::fmax(t0, t1);
    if (hi < -tol || lo > 1.0 + tol) return std::nullopt;
    if (hi - std::fmax(lo, 0.0) < tol && std::fmin(hi, 1.0) - lo < tol) {
      // single touching point at a shared endpoint
      double t = std::fmin(1.0, std::fmax(0.0, 0.5 * (std::fmax(lo, 0.0) + std::fmin(hi, 1.0))));
      double s = (std::abs(t - t0) < std::abs(t - t1)) ? 0.0 : 1.0;
      return std::make_pair(t, s);
    }
    throw std::invalid_argument("collinear overlapping fracture segments are not supported");
  }
  double t = cross(b0 - a0, db) / denom;
  double s = cross(b0 - a0, da) / denom;
  double ta = tol / (norm(da) + tol), tb = tol / (norm(db) + tol);
  if (t < -ta || t > 1.0 + ta || s < -tb || s > 1.0 + tb) return std::nullopt;
  return std::make_pair(std::fmin(1.0, std::fmax(0.0, t)), std::fmin(1.0, std::fmax(0.0, s)));
}

}  // namespace fracsim
