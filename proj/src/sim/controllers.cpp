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

#include "scenofuzz/sim/controllers.hpp"

#include <algorithm>
#include <cmath>

namespace scenofuzz::sim
{
namespace
{

constexpr double kArrivalMargin = 0.5;  // m before the final waypoint

maps::Polyline waypoint_path(const scenario::NpcSpec & spec)
{
  std::vector<maps::Point2> points;
  points.reserve(spec.waypoints.size());
  for (const auto & wp : spec.waypoints) {
    points.push_back(wp.position());
  }
  return maps::Polyline(std::move(points));
}

}  // namespace

double lookahead_distance(double speed) { return std::max(3.0, 1.5 * speed); }

double pure_pursuit_steering(const Pose & pose, double speed, const maps::Polyline & path, double wheelbase)
{
  const maps::Point2 position = pose.position();
  const auto proj = path.project(position);
  const double target_s = proj.s + lookahead_distance(speed);
  maps::Point2 target;
  if (target_s <= path.length()) {
    target = path.point_at(target_s);
  } else {
    const double h = path.heading_at(path.length());
    target = path.point_at(path.length()) + (target_s - path.length()) * maps::Point2{std::cos(h), std::sin(h)};
  }
  const maps::Point2 delta = target - position;
  const double ld = maps::norm(delta);
  if (ld < 1e-6) {
    return 0.0;
  }
  const double alpha = maps::normalize_angle(std::atan2(delta.y, delta.x) - pose.heading);
  const double steering = std::atan(2.0 * wheelbase * std::sin(alpha) / ld);
  return std::clamp(steering, -kMaxSteering, kMaxSteering);
}

ControlCommand longitudinal_command(double desired_accel, double speed, const VehicleParams & params)
{
  const double net = desired_accel + params.drag * speed;
  ControlCommand cmd;
  if (net >= 0.0) {
    cmd.throttle = std::clamp(net / params.a_max, 0.0, 1.0);
  } else {
    cmd.brake = std::clamp(-net / params.b_max, 0.0, 1.0);
  }
  return cmd;
}

double SpeedPid::update(double error, double dt)
{
  integral = std::clamp(integral + error * dt, -integral_limit, integral_limit);
  const double derivative = has_previous && dt > 0.0 ? (error - previous_error) / dt : 0.0;
  previous_error = error;
  has_previous = true;
  return kp * error + ki * integral + kd * derivative;
}

namespace
{

ControlCommand npc_command(
  const scenario::NpcSpec & spec, const maps::Polyline & path, const ActorState & state, double sim_time,
  const VehicleParams & params, SpeedPid & pid, double dt)
{
  if (sim_time < spec.spawn_delay) {
    return {0.0, 1.0, 0.0};
  }
  const auto proj = path.project(state.pose.position());
  if (proj.s >= path.length() - kArrivalMargin) {
    return {0.0, 1.0, 0.0};
  }
  const std::size_t segment = std::min(proj.segment, spec.target_speeds.size() - 1);
  const double accel = pid.update(spec.target_speeds[segment] - state.speed, dt);
  ControlCommand cmd = longitudinal_command(accel, state.speed, params);
  cmd.steering = pure_pursuit_steering(state.pose, state.speed, path, params.wheelbase);
  return cmd;
}

}  // namespace

NpcController::NpcController(scenario::NpcSpec spec) : spec_(std::move(spec)), path_(waypoint_path(spec_)) {}

ControlCommand NpcController::step(const ActorState & state, double sim_time, const VehicleParams & params, double dt)
{
  return npc_command(spec_, path_, state, sim_time, params, pid_, dt);
}

ControlCommand npc_policy(
  const scenario::NpcSpec & spec, const ActorState & state, double sim_time, const VehicleParams & params,
  SpeedPid & pid, double dt)
{
  return npc_command(spec, waypoint_path(spec), state, sim_time, params, pid, dt);
}

}  // namespace scenofuzz::sim
