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

#ifndef SCENOFUZZ__SIM__TYPES_HPP_
#define SCENOFUZZ__SIM__TYPES_HPP_

#include "scenofuzz/common/json.hpp"
#include "scenofuzz/scenario/types.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace scenofuzz::sim
{

using maps::Pose;
using scenario::BodyDims;

inline constexpr double kMaxSteering = 0.61;  // rad
inline constexpr double kDefaultDt = 0.1;     // s

enum class ActorKind { Ego, Npc, Static };

const char * to_string(ActorKind kind);
ActorKind actor_kind_from_string(const std::string & text);

struct ActorState
{
  std::string actor_id;
  Pose pose;
  double speed{0.0};         ///< m/s, never negative
  double acceleration{0.0};  ///< m/s^2, signed longitudinal
  BodyDims body{};
  ActorKind kind{ActorKind::Npc};

  friend bool operator==(const ActorState &, const ActorState &) = default;
};

struct ControlCommand
{
  double throttle{0.0};  ///< [0, 1]
  double brake{0.0};     ///< [0, 1]
  double steering{0.0};  ///< rad, [-kMaxSteering, kMaxSteering]

  friend bool operator==(const ControlCommand &, const ControlCommand &) = default;
};

/// Clamps every field into its legal range.
ControlCommand clamp_command(ControlCommand cmd);

struct VehicleParams
{
  double wheelbase{2.8};  ///< m
  double a_max{3.0};      ///< m/s^2 at full throttle
  double b_max{6.0};      ///< m/s^2 at full brake
  double drag{0.01};      ///< 1/s, linear in speed
  double v_max{30.0};     ///< m/s
};

struct WorldState
{
  double sim_time{0.0};
  std::vector<ActorState> actors;

  const ActorState * find(const std::string & actor_id) const;
  const ActorState & ego() const;
};

class SimError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

Json actor_to_json(const ActorState & actor);
ActorState actor_from_json(const JsonReader & reader);
Json command_to_json(const ControlCommand & cmd);
ControlCommand command_from_json(const JsonReader & reader);

}  // namespace scenofuzz::sim

#endif  // SCENOFUZZ__SIM__TYPES_HPP_
