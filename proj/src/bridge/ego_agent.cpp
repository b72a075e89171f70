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

#include "scenofuzz/bridge/ego_agent.hpp"

#include "scenofuzz/sim/collision.hpp"
#include "scenofuzz/sim/controllers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace scenofuzz::bridge
{
namespace
{

sim::OrientedBox corridor_box(const sim::ActorState & ego)
{
  const double c = std::cos(ego.pose.heading);
  const double s = std::sin(ego.pose.heading);
  const double ahead = 0.5 * ego.body.length + 0.5 * kCorridorLength;
  sim::OrientedBox box;
  box.pose = {ego.pose.x + ahead * c, ego.pose.y + ahead * s, ego.pose.heading};
  box.body = {kCorridorLength, ego.body.width + kCorridorMargin};
  return box;
}

bool ignored(const EgoAgentConfig & config, const sim::ActorState & ego, const sim::ActorState & other)
{
  if (config.fault_ignore_obstacles) {
    return true;
  }
  if (config.fault_ignore_junction_traffic && other.kind == sim::ActorKind::Npc) {
    return std::abs(maps::normalize_angle(other.pose.heading - ego.pose.heading)) > kJunctionHeadingTolerance;
  }
  return false;
}

}  // namespace

EgoDecision ego_agent_decide(const EgoAgentConfig & config, const PerceptionMessage & perception)
{
  if (!(config.cruise_speed > 0.0 && config.cruise_speed <= config.params.v_max)) {
    throw std::invalid_argument("cruise_speed must lie in (0, v_max]");
  }
  const sim::ActorState & ego = perception.ego_state;
  const maps::Polyline & path = config.route.stitched_centerline;

  EgoDecision decision;
  decision.control.sim_time = perception.sim_time;

  const auto proj = path.project(ego.pose.position());
  if (proj.distance > kOffRouteDistance) {
    decision.off_route = true;
    decision.control.command = {0.0, 1.0, 0.0};
    return decision;
  }

  const double remaining = std::max(path.length() - proj.s - kStopMargin, 0.0);
  const double target = std::min(config.cruise_speed, std::sqrt(2.0 * kStopDeceleration * remaining));
  const double accel = std::min(kSpeedGain * (target - ego.speed), kMaxComfortAccel);
  sim::ControlCommand cmd = sim::longitudinal_command(accel, ego.speed, config.params);
  cmd.brake = std::min(cmd.brake, kMaxComfortBrake);
  cmd.steering = sim::pure_pursuit_steering(ego.pose, ego.speed, path, config.params.wheelbase);

  const sim::OrientedBox corridor = corridor_box(ego);
  double gap = -1.0;
  for (const auto & other : perception.obstacles) {
    if (ignored(config, ego, other)) {
      continue;
    }
    const sim::OrientedBox box{other.pose, other.body};
    if (!sim::boxes_intersect(corridor, box)) {
      continue;
    }
    const double d = sim::obb_distance(sim::OrientedBox{ego.pose, ego.body}, box);
    if (gap < 0.0 || d < gap) {
      gap = d;
    }
  }
  decision.corridor_gap = gap;
  if (gap >= 0.0) {
    const double headway_gap = kTimeHeadway * ego.speed;
    double brake = 0.0;
    if (gap < kFullBrakeGap) {
      brake = 1.0;
    } else if (gap < headway_gap) {
      brake = (headway_gap - gap) / (headway_gap - kFullBrakeGap);
    }
    if (brake > 0.0) {
      cmd.throttle = 0.0;
      cmd.brake = std::max(cmd.brake, std::clamp(brake, 0.0, 1.0));
    }
  }
  decision.control.command = sim::clamp_command(cmd);
  return decision;
}

ControlMessage ego_agent_step(const EgoAgentConfig & config, const PerceptionMessage & perception)
{
  return ego_agent_decide(config, perception).control;
}

AgentHandlerFactory ego_agent_factory(EgoAgentConfig config)
{
  return [config = std::move(config)] {
    return [config](const PerceptionMessage & perception) { return ego_agent_step(config, perception); };
  };
}

}  // namespace scenofuzz::bridge
