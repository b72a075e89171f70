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

#ifndef SCENOFUZZ__SIM__CONTROLLERS_HPP_
#define SCENOFUZZ__SIM__CONTROLLERS_HPP_

#include "scenofuzz/maps/geometry.hpp"
#include "scenofuzz/scenario/types.hpp"
#include "scenofuzz/sim/types.hpp"

namespace scenofuzz::sim
{

/// Lookahead distance used by every pure-pursuit tracker: max(3 m, 1.5 s * v).
double lookahead_distance(double speed);

/// Pure-pursuit steering toward the point one lookahead ahead of the
/// vehicle's projection on `path`. Beyond the path end the final segment is
/// extended straight. Result is clamped to +-kMaxSteering.
double pure_pursuit_steering(const Pose & pose, double speed, const maps::Polyline & path, double wheelbase);

/// Maps a desired longitudinal acceleration to throttle/brake fractions,
/// including feed-forward drag compensation at the current speed.
ControlCommand longitudinal_command(double desired_accel, double speed, const VehicleParams & params);

/// PI(D) speed tracker with the integral clamped to +-integral_limit.
struct SpeedPid
{
  double kp{0.8};
  double ki{0.05};
  double kd{0.0};
  double integral_limit{2.0};

  double integral{0.0};
  double previous_error{0.0};
  bool has_previous{false};

  /// Returns the desired acceleration for speed error (target - actual).
  double update(double error, double dt);
};

/// Waypoint-following NPC driver: pure-pursuit steering plus PID tracking of
/// the active segment's target speed. Holds full brake before spawn_delay and
/// after reaching the final waypoint.
class NpcController
{
public:
  explicit NpcController(scenario::NpcSpec spec);

  ControlCommand step(const ActorState & state, double sim_time, const VehicleParams & params, double dt);

  const SpeedPid & pid() const { return pid_; }

private:
  scenario::NpcSpec spec_;
  maps::Polyline path_;
  SpeedPid pid_;
};

/// Stateless form of NpcController::step; the PID memory is passed in.
ControlCommand npc_policy(
  const scenario::NpcSpec & spec, const ActorState & state, double sim_time, const VehicleParams & params,
  SpeedPid & pid, double dt);

}  // namespace scenofuzz::sim

#endif  // SCENOFUZZ__SIM__CONTROLLERS_HPP_
