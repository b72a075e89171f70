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

#include "scenofuzz/maps/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace scenofuzz::maps
{

double normalize_angle(double angle)
{
  constexpr double kPi = std::numbers::pi;
  double a = std::fmod(angle, 2.0 * kPi);
  if (a <= -kPi) {
    a += 2.0 * kPi;
  } else if (a > kPi) {
    a -= 2.0 * kPi;
  }
  return a;
}

Polyline::Polyline(std::vector<Point2> points) : points_(std::move(points))
{
  if (points_.size() < 2) {
    throw std::invalid_argument("polyline needs at least two points");
  }
  cumulative_.reserve(points_.size());
  cumulative_.push_back(0.0);
  for (std::size_t i = 1; i < points_.size(); ++i) {
    cumulative_.push_back(cumulative_.back() + distance(points_[i - 1], points_[i]));
  }
}

std::size_t Polyline::segment_index(double s) const
{
  // Last vertex whose station is <= s, restricted to valid segment starts.
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  std::size_t idx = it == cumulative_.begin() ? 0 : static_cast<std::size_t>(it - cumulative_.begin()) - 1;
  return std::min(idx, points_.size() - 2);
}

Point2 Polyline::point_at(double s) const
{
  s = std::clamp(s, 0.0, length());
  const std::size_t i = segment_index(s);
  const double seg_len = cumulative_[i + 1] - cumulative_[i];
  const double t = seg_len > 0.0 ? (s - cumulative_[i]) / seg_len : 0.0;
  return points_[i] + t * (points_[i + 1] - points_[i]);
}

double Polyline::heading_at(double s) const
{
  const std::size_t i = segment_index(std::clamp(s, 0.0, length()));
  const Point2 d = points_[i + 1] - points_[i];
  return normalize_angle(std::atan2(d.y, d.x));
}

Pose Polyline::pose_at(double s) const
{
  const Point2 p = point_at(s);
  return {p.x, p.y, heading_at(s)};
}

PolylineProjection Polyline::project(Point2 p) const
{
  PolylineProjection best;
  best.distance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
    const Point2 a = points_[i];
    const Point2 d = points_[i + 1] - a;
    const double len2 = dot(d, d);
    const double t = len2 > 0.0 ? std::clamp(dot(p - a, d) / len2, 0.0, 1.0) : 0.0;
    const Point2 foot = a + t * d;
    const double dist = distance(p, foot);
    if (dist < best.distance) {
      const double side = cross(d, p - a);
      best.distance = dist;
      best.s = cumulative_[i] + t * (cumulative_[i + 1] - cumulative_[i]);
      best.lateral_offset = side > 0.0 ? dist : (side < 0.0 ? -dist : 0.0);
      best.segment = i;
    }
  }
  return best;
}

}  // namespace scenofuzz::maps
