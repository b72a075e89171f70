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

#include "scenofuzz/sim/types.hpp"

#include "scenofuzz/scenario/scenario.hpp"

#include <algorithm>

namespace scenofuzz::sim
{

const char * to_string(ActorKind kind)
{
  switch (kind) {
    case ActorKind::Ego:
      return "ego";
    case ActorKind::Npc:
      return "npc";
    case ActorKind::Static:
      return "static";
  }
  return "npc";
}

ActorKind actor_kind_from_string(const std::string & text)
{
  if (text == "ego") return ActorKind::Ego;
  if (text == "npc") return ActorKind::Npc;
  if (text == "static") return ActorKind::Static;
  throw std::invalid_argument("unknown actor kind: " + text);
}

ControlCommand clamp_command(ControlCommand cmd)
{
  cmd.throttle = std::clamp(cmd.throttle, 0.0, 1.0);
  cmd.brake = std::clamp(cmd.brake, 0.0, 1.0);
  cmd.steering = std::clamp(cmd.steering, -kMaxSteering, kMaxSteering);
  return cmd;
}

const ActorState * WorldState::find(const std::string & actor_id) const
{
  for (const auto & actor : actors) {
    if (actor.actor_id == actor_id) {
      return &actor;
    }
  }
  return nullptr;
}

const ActorState & WorldState::ego() const
{
  for (const auto & actor : actors) {
    if (actor.kind == ActorKind::Ego) {
      return actor;
    }
  }
  throw SimError("world has no ego actor");
}

Json actor_to_json(const ActorState & actor)
{
  return {
    {"actor_id", actor.actor_id},
    {"kind", to_string(actor.kind)},
    {"pose", scenario::pose_to_json(actor.pose)},
    {"speed", actor.speed},
    {"acceleration", actor.acceleration},
    {"body", scenario::body_to_json(actor.body)},
  };
}

ActorState actor_from_json(const JsonReader & reader)
{
  reader.expect_keys({"actor_id", "kind", "pose", "speed", "acceleration", "body"});
  ActorState actor;
  actor.actor_id = reader.at("actor_id").string();
  const auto kind = reader.at("kind");
  try {
    actor.kind = actor_kind_from_string(kind.string());
  } catch (const std::invalid_argument & e) {
    kind.fail(e.what());
  }
  actor.pose = scenario::pose_from_json(reader.at("pose"));
  actor.speed = reader.at("speed").number();
  if (actor.speed < 0.0) {
    reader.at("speed").fail("speed must be non-negative");
  }
  actor.acceleration = reader.at("acceleration").number();
  actor.body = scenario::body_from_json(reader.at("body"));
  return actor;
}

Json command_to_json(const ControlCommand & cmd)
{
  return {{"throttle", cmd.throttle}, {"brake", cmd.brake}, {"steering", cmd.steering}};
}

ControlCommand command_from_json(const JsonReader & reader)
{
  reader.expect_keys({"throttle", "brake", "steering"});
  return {reader.at("throttle").number(), reader.at("brake").number(), reader.at("steering").number()};
}

}  // namespace scenofuzz::sim
