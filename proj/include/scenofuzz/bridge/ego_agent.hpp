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

#ifndef SCENOFUZZ__BRIDGE__EGO_AGENT_HPP_
#define SCENOFUZZ__BRIDGE__EGO_AGENT_HPP_

#include "scenofuzz/bridge/messages.hpp"
#include "scenofuzz/bridge/transport.hpp"
#include "scenofuzz/maps/lane_map.hpp"

namespace scenofuzz::bridge
{

/// Reference system under test: pure pursuit along a fixed route, cruise
/// speed tracking, and headway braking for obstacles in a forward corridor.
struct EgoAgentConfig
{
  maps::Route route;
  double cruise_speed{8.0};  ///< m/s
  bool fault_ignore_obstacles{false};
  /// Skips actors of kind npc whose heading differs from the ego's by more
  /// than kJunctionHeadingTolerance, i.e. crossing and turning traffic.
  bool fault_ignore_junction_traffic{false};
  sim::VehicleParams params{};
};

inline constexpr double kCorridorLength = 25.0;        // m ahead of the front bumper
inline constexpr double kCorridorMargin = 1.0;         // m added to the ego width
inline constexpr double kFullBrakeGap = 6.0;           // m
inline constexpr double kTimeHeadway = 2.0;            // s
inline constexpr double kOffRouteDistance = 20.0;      // m
inline constexpr double kJunctionHeadingTolerance = 0.5235987755982988;  // rad (30 deg)
inline constexpr double kStopDeceleration = 1.5;       // m/s^2 planned at the goal
inline constexpr double kStopMargin = 1.0;             // m short of the route end
inline constexpr double kSpeedGain = 2.0;              // 1/s
inline constexpr double kMaxComfortAccel = 2.0;        // m/s^2
inline constexpr double kMaxComfortBrake = 0.5;        // brake fraction

struct EgoDecision
{
  ControlMessage control;
  bool off_route{false};
  /// Gap to the nearest obstacle considered in the corridor, -1 when none.
  double corridor_gap{-1.0};
};

EgoDecision ego_agent_decide(const EgoAgentConfig & config, const PerceptionMessage & perception);

/// Throws std::invalid_argument unless cruise_speed is in (0, v_max].
ControlMessage ego_agent_step(const EgoAgentConfig & config, const PerceptionMessage & perception);

/// Handler factory serving the reference agent on a bridge endpoint.
AgentHandlerFactory ego_agent_factory(EgoAgentConfig config);

}  // namespace scenofuzz::bridge

#endif  // SCENOFUZZ__BRIDGE__EGO_AGENT_HPP_
