// Copyright 2026 The Scenofuzz Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SCENOFUZZ__MAPS__GEOMETRY_HPP_
#define SCENOFUZZ__MAPS__GEOMETRY_HPP_

#include <cmath>
#include <vector>

namespace scenofuzz::maps
{

struct Point2
{
  double x{0.0};
  double y{0.0};

  friend bool operator==(const Point2 &, const Point2 &) = default;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double k, Point2 a) { return {k * a.x, k * a.y}; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }

/// Wraps an angle into (-pi, pi].
double normalize_angle(double angle);

/// Planar pose in the map frame; heading in (-pi, pi], counter-clockwise
/// from +x.
struct Pose
{
  double x{0.0};
  double y{0.0};
  double heading{0.0};

  Point2 position() const { return {x, y}; }
  friend bool operator==(const Pose &, const Pose &) = default;
};

struct PolylineProjection
{
  double s{0.0};               ///< arc length of the foot point
  double lateral_offset{0.0};  ///< signed, positive to the left of travel
  double distance{0.0};        ///< unsigned distance to the polyline
  std::size_t segment{0};
};

/// Open polyline with cached cumulative arc length.
class Polyline
{
public:
  Polyline() = default;
  explicit Polyline(std::vector<Point2> points);

  const std::vector<Point2> & points() const { return points_; }
  double length() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }
  double station(std::size_t vertex) const { return cumulative_.at(vertex); }
  std::size_t size() const { return points_.size(); }

  /// Point at arc length s, clamped to [0, length()].
  Point2 point_at(double s) const;

  /// Tangent heading at arc length s. At an interior vertex the outgoing
  /// segment is used; at the far end the last segment.
  double heading_at(double s) const;

  Pose pose_at(double s) const;

  /// Closest point over all segments; ties keep the earliest segment.
  PolylineProjection project(Point2 p) const;

private:
  std::size_t segment_index(double s) const;

  std::vector<Point2> points_;
  std::vector<double> cumulative_;
};

}  // namespace scenofuzz::maps

#endif  // SCENOFUZZ__MAPS__GEOMETRY_HPP_
