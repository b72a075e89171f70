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

#ifndef SCENOFUZZ__SIM__COLLISION_HPP_
#define SCENOFUZZ__SIM__COLLISION_HPP_

#include "scenofuzz/sim/types.hpp"

#include <array>

namespace scenofuzz::sim
{

/// Rectangle of body.length x body.width centered at pose, long axis along
/// the heading.
struct OrientedBox
{
  Pose pose;
  BodyDims body;

  /// Corners in counter-clockwise order starting front-left.
  std::array<maps::Point2, 4> corners() const;
};

bool boxes_intersect(const OrientedBox & a, const OrientedBox & b);

/// Euclidean separation between two oriented rectangles; 0 when they
/// intersect or touch. Symmetric bit-for-bit in its arguments.
double obb_distance(const OrientedBox & a, const OrientedBox & b);

double obb_distance(const ActorState & a, const ActorState & b);

}  // namespace scenofuzz::sim

#endif  // SCENOFUZZ__SIM__COLLISION_HPP_
