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

#include "scenofuzz/sim/collision.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace scenofuzz::sim
{
namespace
{

using maps::Point2;

double point_segment_distance(Point2 p, Point2 a, Point2 b)
{
  const Point2 d = b - a;
  const double len2 = maps::dot(d, d);
  const double t = len2 > 0.0 ? std::clamp(maps::dot(p - a, d) / len2, 0.0, 1.0) : 0.0;
  return maps::distance(p, a + t * d);
}

// True when the projections of both corner sets onto `axis` are disjoint.
bool separated_on(Point2 axis, const std::array<Point2, 4> & a, const std::array<Point2, 4> & b)
{
  double min_a = std::numeric_limits<double>::infinity();
  double max_a = -min_a;
  double min_b = min_a;
  double max_b = -min_a;
  for (const auto & p : a) {
    const double v = maps::dot(p, axis);
    min_a = std::min(min_a, v);
    max_a = std::max(max_a, v);
  }
  for (const auto & p : b) {
    const double v = maps::dot(p, axis);
    min_b = std::min(min_b, v);
    max_b = std::max(max_b, v);
  }
  return max_a < min_b || max_b < min_a;
}

double corners_to_edges(const std::array<Point2, 4> & corners, const std::array<Point2, 4> & polygon)
{
  double best = std::numeric_limits<double>::infinity();
  for (const auto & p : corners) {
    for (std::size_t i = 0; i < 4; ++i) {
      best = std::min(best, point_segment_distance(p, polygon[i], polygon[(i + 1) % 4]));
    }
  }
  return best;
}

}  // namespace

std::array<Point2, 4> OrientedBox::corners() const
{
  const double c = std::cos(pose.heading);
  const double s = std::sin(pose.heading);
  const double hl = 0.5 * body.length;
  const double hw = 0.5 * body.width;
  const Point2 center{pose.x, pose.y};
  const Point2 fwd{c * hl, s * hl};
  const Point2 left{-s * hw, c * hw};
  return {center + fwd + left, center - fwd + left, center - fwd - left, center + fwd - left};
}

bool boxes_intersect(const OrientedBox & a, const OrientedBox & b)
{
  const auto ca = a.corners();
  const auto cb = b.corners();
  const Point2 axes[4] = {
    {std::cos(a.pose.heading), std::sin(a.pose.heading)},
    {-std::sin(a.pose.heading), std::cos(a.pose.heading)},
    {std::cos(b.pose.heading), std::sin(b.pose.heading)},
    {-std::sin(b.pose.heading), std::cos(b.pose.heading)},
  };
  for (const auto & axis : axes) {
    if (separated_on(axis, ca, cb)) {
      return false;
    }
  }
  return true;
}

double obb_distance(const OrientedBox & a, const OrientedBox & b)
{
  if (boxes_intersect(a, b)) {
    return 0.0;
  }
  // Disjoint convex polygons: the closest pair always involves a vertex of
  // one polygon and an edge of the other.
  const auto ca = a.corners();
  const auto cb = b.corners();
  return std::min(corners_to_edges(ca, cb), corners_to_edges(cb, ca));
}

double obb_distance(const ActorState & a, const ActorState & b)
{
  return obb_distance(OrientedBox{a.pose, a.body}, OrientedBox{b.pose, b.body});
}

}  // namespace scenofuzz::sim
