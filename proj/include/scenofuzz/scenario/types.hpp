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

#ifndef SCENOFUZZ__SCENARIO__TYPES_HPP_
#define SCENOFUZZ__SCENARIO__TYPES_HPP_

#include "scenofuzz/maps/geometry.hpp"

#include <string>
#include <vector>

namespace scenofuzz::scenario
{

using maps::Pose;

inline constexpr const char * kEgoActorId = "ego";
inline constexpr double kNpcMaxSpeed = 30.0;
inline constexpr double kMaxBodyLength = 20.0;

struct BodyDims
{
  double length{4.7};
  double width{2.0};

  friend bool operator==(const BodyDims &, const BodyDims &) = default;
};

/// Ego mission: start and destination given as stations along lanes.
struct EgoSpec
{
  std::string start_lane;
  double start_station{0.0};
  std::string end_lane;
  double end_station{0.0};
  BodyDims body{};

  friend bool operator==(const EgoSpec &, const EgoSpec &) = default;
};

/// Scripted vehicle following waypoints; target_speeds[i] applies to the
/// segment waypoints[i] -> waypoints[i + 1].
struct NpcSpec
{
  std::string actor_id;
  std::vector<Pose> waypoints;
  std::vector<double> target_speeds;
  double spawn_delay{0.0};
  BodyDims body{4.5, 1.9};

  friend bool operator==(const NpcSpec &, const NpcSpec &) = default;
};

struct ObstacleSpec
{
  std::string actor_id;
  Pose pose;
  BodyDims body{};

  friend bool operator==(const ObstacleSpec &, const ObstacleSpec &) = default;
};

struct ScenarioConfig
{
  std::string scenario_id;
  std::string map_name;
  EgoSpec ego;
  std::vector<NpcSpec> npc_vehicles;
  std::vector<ObstacleSpec> static_obstacles;
  double duration_limit{40.0};

  friend bool operator==(const ScenarioConfig &, const ScenarioConfig &) = default;
};

}  // namespace scenofuzz::scenario

#endif  // SCENOFUZZ__SCENARIO__TYPES_HPP_
