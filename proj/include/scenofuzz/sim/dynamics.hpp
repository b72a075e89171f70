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

#ifndef SCENOFUZZ__SIM__DYNAMICS_HPP_
#define SCENOFUZZ__SIM__DYNAMICS_HPP_

#include "scenofuzz/sim/types.hpp"

#include <map>
#include <string>

namespace scenofuzz::sim
{

/// One explicit-Euler step of the kinematic bicycle model.
///
///   a  = throttle * a_max - brake * b_max - drag * v
///   v' = clamp(v + a dt, 0, v_max)
///   th' = normalize(th + v / wheelbase * tan(steering) * dt)
///   x' = x + v cos(th) dt,  y' = y + v sin(th) dt
///
/// Position and heading use the speed and heading at the start of the step.
/// The returned state's acceleration field holds `a`. Static actors are
/// returned unchanged.
ActorState step_kinematic(const ActorState & state, const ControlCommand & cmd, const VehicleParams & params, double dt);

using ControlMap = std::map<std::string, ControlCommand>;

/// Advances every actor from the same pre-step snapshot. `controls` must hold
/// exactly the non-static actors; throws SimError otherwise.
WorldState step_world(const WorldState & world, const ControlMap & controls, const VehicleParams & params, double dt);

}  // namespace scenofuzz::sim

#endif  // SCENOFUZZ__SIM__DYNAMICS_HPP_
