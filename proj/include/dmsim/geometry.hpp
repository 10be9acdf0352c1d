#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace dmsim {

/// Planar position in meters.
struct GeoPoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const GeoPoint& a, const GeoPoint& b) {
    return a.x == b.x && a.y == b.y;
  }
};

inline double distance(const GeoPoint& p, const GeoPoint& q) {
  return std::hypot(p.x - q.x, p.y - q.y);
}

/// Shortest distance from point c to the segment [a, b].
inline double point_segment_distance(const GeoPoint& c, const GeoPoint& a, const GeoPoint& b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  if (len2 == 0.0) {
    return distance(c, a);
  }
  double t = ((c.x - a.x) * dx + (c.y - a.y) * dy) / len2;
  t = std::fmin(1.0, std::fmax(0.0, t));
  return distance(c, GeoPoint{a.x + t * dx, a.y + t * dy});
}

/// Closed patrol loop over an ordered waypoint list. The loop runs
/// waypoint[0] -> ... -> waypoint[n-1] -> waypoint[0].
class RouteLoop {
 public:
  explicit RouteLoop(std::vector<GeoPoint> waypoints) : points_(std::move(waypoints)) {
    seg_lengths_.reserve(points_.size());
    for (std::size_t i = 0; i < points_.size(); ++i) {
      const GeoPoint& a = points_[i];
      const GeoPoint& b = points_[(i + 1) % points_.size()];
      seg_lengths_.push_back(distance(a, b));
      perimeter_ += seg_lengths_.back();
    }
  }

  const std::vector<GeoPoint>& waypoints() const { return points_; }
  double perimeter() const { return perimeter_; }

  /// Position at arc length s from waypoint[0], wrapping around the loop.
  GeoPoint at(double s) const {
    if (points_.size() == 1 || perimeter_ == 0.0) {
      return points_.front();
    }
    s = std::fmod(s, perimeter_);
    if (s < 0.0) s += perimeter_;
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (s <= seg_lengths_[i]) {
        const GeoPoint& a = points_[i];
        const GeoPoint& b = points_[(i + 1) % points_.size()];
        if (seg_lengths_[i] == 0.0) return a;
        const double t = s / seg_lengths_[i];
        return GeoPoint{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
      }
      s -= seg_lengths_[i];
    }
    return points_.front();
  }

  /// Shortest distance from the loop polyline (including closing segment) to p.
  double distance_to(const GeoPoint& p) const {
    double best = distance(p, points_.front());
    for (std::size_t i = 0; i < points_.size(); ++i) {
      const GeoPoint& a = points_[i];
      const GeoPoint& b = points_[(i + 1) % points_.size()];
      best = std::fmin(best, point_segment_distance(p, a, b));
    }
    return best;
  }

 private:
  std::vector<GeoPoint> points_;
  std::vector<double> seg_lengths_;
  double perimeter_ = 0.0;
};

}  // namespace dmsim
