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

#include "scenofuzz/sim/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace scenofuzz::sim
{

ActorState step_kinematic(const ActorState & state, const ControlCommand & cmd, const VehicleParams & params, double dt)
{
  if (state.kind == ActorKind::Static) {
    return state;
  }
  const double v = state.speed;
  const double theta = state.pose.heading;
  const double a = cmd.throttle * params.a_max - cmd.brake * params.b_max - params.drag * v;

  ActorState next = state;
  next.speed = std::clamp(v + a * dt, 0.0, params.v_max);
  next.pose.heading = maps::normalize_angle(theta + (v / params.wheelbase) * std::tan(cmd.steering) * dt);
  next.pose.x = state.pose.x + v * std::cos(theta) * dt;
  next.pose.y = state.pose.y + v * std::sin(theta) * dt;
  next.acceleration = a;
  return next;
}

WorldState step_world(const WorldState & world, const ControlMap & controls, const VehicleParams & params, double dt)
{
  std::size_t dynamic_count = 0;
  for (const auto & actor : world.actors) {
    if (actor.kind == ActorKind::Static) {
      continue;
    }
    ++dynamic_count;
    if (controls.count(actor.actor_id) == 0) {
      throw SimError("missing control for actor " + actor.actor_id);
    }
  }
  if (controls.size() != dynamic_count) {
    for (const auto & [id, cmd] : controls) {
      const ActorState * actor = world.find(id);
      if (actor == nullptr || actor->kind == ActorKind::Static) {
        throw SimError("unexpected control for actor " + id);
      }
    }
  }

  WorldState next;
  next.sim_time = world.sim_time + dt;
  next.actors.reserve(world.actors.size());
  for (const auto & actor : world.actors) {
    if (actor.kind == ActorKind::Static) {
      next.actors.push_back(actor);
    } else {
      next.actors.push_back(step_kinematic(actor, controls.at(actor.actor_id), params, dt));
    }
  }
  return next;
}

}  // namespace scenofuzz::sim
