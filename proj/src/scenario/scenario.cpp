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

#include "scenofuzz/scenario/scenario.hpp"

#include "scenofuzz/sim/collision.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace scenofuzz::scenario
{
namespace
{

constexpr const char * kVehicleKind = "vehicle";

struct SpawnBox
{
  std::string actor_id;
  sim::OrientedBox box;
};

}  // namespace

Json pose_to_json(const Pose & pose) { return {{"x", pose.x}, {"y", pose.y}, {"heading", pose.heading}}; }

Pose pose_from_json(const JsonReader & reader)
{
  reader.expect_keys({"x", "y", "heading"});
  return {reader.at("x").number(), reader.at("y").number(), reader.at("heading").number()};
}

Json body_to_json(const BodyDims & body) { return {{"length", body.length}, {"width", body.width}}; }

BodyDims body_from_json(const JsonReader & reader)
{
  reader.expect_keys({"length", "width"});
  return {reader.at("length").number(), reader.at("width").number()};
}

Json to_json(const ScenarioConfig & config)
{
  Json npcs = Json::array();
  for (const auto & npc : config.npc_vehicles) {
    Json waypoints = Json::array();
    for (const auto & wp : npc.waypoints) {
      waypoints.push_back(pose_to_json(wp));
    }
    npcs.push_back({
      {"actor_id", npc.actor_id},
      {"kind", kVehicleKind},
      {"waypoints", waypoints},
      {"target_speeds", npc.target_speeds},
      {"spawn_delay", npc.spawn_delay},
      {"body", body_to_json(npc.body)},
    });
  }
  Json obstacles = Json::array();
  for (const auto & obstacle : config.static_obstacles) {
    obstacles.push_back({
      {"actor_id", obstacle.actor_id},
      {"pose", pose_to_json(obstacle.pose)},
      {"body", body_to_json(obstacle.body)},
    });
  }
  return {
    {"schema_version", kSchemaVersion},
    {"scenario_id", config.scenario_id},
    {"map_name", config.map_name},
    {"ego",
     {
       {"start_lane", config.ego.start_lane},
       {"start_station", config.ego.start_station},
       {"end_lane", config.ego.end_lane},
       {"end_station", config.ego.end_station},
       {"body", body_to_json(config.ego.body)},
     }},
    {"npc_vehicles", npcs},
    {"static_obstacles", obstacles},
    {"duration_limit", config.duration_limit},
  };
}

ScenarioConfig from_json(const Json & doc)
{
  JsonReader root(doc, "");
  root.expect_keys(
    {"schema_version", "scenario_id", "map_name", "ego", "npc_vehicles", "static_obstacles", "duration_limit"});
  if (root.at("schema_version").integer() != kSchemaVersion) {
    root.at("schema_version").fail("unsupported schema version");
  }
  ScenarioConfig config;
  config.scenario_id = root.at("scenario_id").string();
  config.map_name = root.at("map_name").string();

  const auto ego = root.at("ego");
  ego.expect_keys({"start_lane", "start_station", "end_lane", "end_station", "body"});
  config.ego.start_lane = ego.at("start_lane").string();
  config.ego.start_station = ego.at("start_station").number();
  config.ego.end_lane = ego.at("end_lane").string();
  config.ego.end_station = ego.at("end_station").number();
  config.ego.body = body_from_json(ego.at("body"));

  const auto npcs = root.at("npc_vehicles");
  for (std::size_t i = 0; i < npcs.array_size(); ++i) {
    const auto item = npcs.at(i);
    item.expect_keys({"actor_id", "kind", "waypoints", "target_speeds", "spawn_delay", "body"});
    if (item.has("kind") && item.at("kind").string() != kVehicleKind) {
      item.at("kind").fail("unsupported actor kind (only \"vehicle\" is implemented)");
    }
    NpcSpec npc;
    npc.actor_id = item.at("actor_id").string();
    const auto waypoints = item.at("waypoints");
    for (std::size_t k = 0; k < waypoints.array_size(); ++k) {
      npc.waypoints.push_back(pose_from_json(waypoints.at(k)));
    }
    const auto speeds = item.at("target_speeds");
    for (std::size_t k = 0; k < speeds.array_size(); ++k) {
      npc.target_speeds.push_back(speeds.at(k).number());
    }
    npc.spawn_delay = item.at("spawn_delay").number();
    npc.body = body_from_json(item.at("body"));
    config.npc_vehicles.push_back(std::move(npc));
  }

  const auto obstacles = root.at("static_obstacles");
  for (std::size_t i = 0; i < obstacles.array_size(); ++i) {
    const auto item = obstacles.at(i);
    item.expect_keys({"actor_id", "pose", "body"});
    config.static_obstacles.push_back(
      {item.at("actor_id").string(), pose_from_json(item.at("pose")), body_from_json(item.at("body"))});
  }
  config.duration_limit = root.at("duration_limit").number();
  return config;
}

std::string to_canonical_string(const ScenarioConfig & config) { return canonical_dump(to_json(config)); }

ScenarioConfig load_scenario(const std::filesystem::path & path)
{
  return from_json(parse_json(read_text_file(path)));
}

void save_scenario(const ScenarioConfig & config, const std::filesystem::path & path)
{
  write_text_file_atomic(path, to_canonical_string(config) + "\n");
}

Pose ego_start_pose(const ScenarioConfig & config, const maps::LaneMap & map)
{
  return map.lane(config.ego.start_lane).centerline.pose_at(config.ego.start_station);
}

maps::Point2 ego_goal_point(const ScenarioConfig & config, const maps::LaneMap & map)
{
  return map.lane(config.ego.end_lane).centerline.point_at(config.ego.end_station);
}

const char * to_string(ViolationCode code)
{
  switch (code) {
    case ViolationCode::DuplicateActorId:
      return "DuplicateActorId";
    case ViolationCode::NonPositiveDuration:
      return "NonPositiveDuration";
    case ViolationCode::MapNameMismatch:
      return "MapNameMismatch";
    case ViolationCode::UnknownLane:
      return "UnknownLane";
    case ViolationCode::StationOutOfRange:
      return "StationOutOfRange";
    case ViolationCode::NoEgoRoute:
      return "NoEgoRoute";
    case ViolationCode::InvalidBody:
      return "InvalidBody";
    case ViolationCode::TooFewWaypoints:
      return "TooFewWaypoints";
    case ViolationCode::SpeedCountMismatch:
      return "SpeedCountMismatch";
    case ViolationCode::SpeedOutOfRange:
      return "SpeedOutOfRange";
    case ViolationCode::NegativeSpawnDelay:
      return "NegativeSpawnDelay";
    case ViolationCode::InitialOverlap:
      return "InitialOverlap";
  }
  return "Unknown";
}

std::vector<Violation> validate(const ScenarioConfig & config, const maps::LaneMap & map)
{
  std::vector<Violation> out;
  auto add = [&out](ViolationCode code, std::vector<std::string> subjects, std::string message) {
    out.push_back({code, std::move(subjects), std::move(message)});
  };

  if (!(config.duration_limit > 0.0)) {
    add(ViolationCode::NonPositiveDuration, {}, "duration_limit must be positive");
  }
  if (config.map_name != map.name()) {
    add(ViolationCode::MapNameMismatch, {config.map_name}, "scenario map " + config.map_name + " != " + map.name());
  }

  bool ego_lanes_ok = true;
  for (const auto & [lane_id, station] :
       {std::pair{config.ego.start_lane, config.ego.start_station}, std::pair{config.ego.end_lane, config.ego.end_station}}) {
    if (!map.contains(lane_id)) {
      add(ViolationCode::UnknownLane, {lane_id}, "unknown lane " + lane_id);
      ego_lanes_ok = false;
    } else if (!(station >= 0.0) || station > map.lane(lane_id).length()) {
      add(ViolationCode::StationOutOfRange, {lane_id}, "station outside lane " + lane_id);
      ego_lanes_ok = false;
    }
  }
  if (ego_lanes_ok) {
    try {
      const auto r = maps::route(map, config.ego.start_lane, config.ego.end_lane);
      const double start_s = maps::route_station(map, r, config.ego.start_lane, config.ego.start_station);
      const double end_s = maps::route_station(map, r, config.ego.end_lane, config.ego.end_station);
      if (end_s <= start_s) {
        add(ViolationCode::NoEgoRoute, {config.ego.start_lane, config.ego.end_lane}, "destination is not ahead of start");
      }
    } catch (const maps::MapError & e) {
      add(ViolationCode::NoEgoRoute, {config.ego.start_lane, config.ego.end_lane}, e.what());
    }
  }

  auto body_ok = [](const BodyDims & b) { return b.width > 0.0 && b.width <= b.length && b.length <= kMaxBodyLength; };
  if (!body_ok(config.ego.body)) {
    add(ViolationCode::InvalidBody, {kEgoActorId}, "invalid ego body");
  }
  for (const auto & npc : config.npc_vehicles) {
    if (!body_ok(npc.body)) add(ViolationCode::InvalidBody, {npc.actor_id}, "invalid body");
  }
  for (const auto & obstacle : config.static_obstacles) {
    if (!body_ok(obstacle.body)) add(ViolationCode::InvalidBody, {obstacle.actor_id}, "invalid body");
  }

  std::vector<std::string> ids{kEgoActorId};
  for (const auto & npc : config.npc_vehicles) ids.push_back(npc.actor_id);
  for (const auto & obstacle : config.static_obstacles) ids.push_back(obstacle.actor_id);
  std::set<std::string> seen;
  std::set<std::string> reported;
  for (const auto & id : ids) {
    if (!seen.insert(id).second && reported.insert(id).second) {
      add(ViolationCode::DuplicateActorId, {id}, "duplicate actor id " + id);
    }
  }

  for (const auto & npc : config.npc_vehicles) {
    if (npc.waypoints.size() < 2) {
      add(ViolationCode::TooFewWaypoints, {npc.actor_id}, "needs at least 2 waypoints");
    } else if (npc.target_speeds.size() != npc.waypoints.size() - 1) {
      add(ViolationCode::SpeedCountMismatch, {npc.actor_id}, "need one target speed per segment");
    }
    for (double v : npc.target_speeds) {
      if (!(v >= 0.0 && v <= kNpcMaxSpeed)) {
        add(ViolationCode::SpeedOutOfRange, {npc.actor_id}, "target speed outside [0, 30] m/s");
        break;
      }
    }
    if (!(npc.spawn_delay >= 0.0)) {
      add(ViolationCode::NegativeSpawnDelay, {npc.actor_id}, "spawn_delay must be >= 0");
    }
  }

  std::vector<SpawnBox> boxes;
  if (ego_lanes_ok) {
    boxes.push_back({kEgoActorId, {ego_start_pose(config, map), config.ego.body}});
  }
  for (const auto & npc : config.npc_vehicles) {
    if (!npc.waypoints.empty()) boxes.push_back({npc.actor_id, {npc.waypoints.front(), npc.body}});
  }
  for (const auto & obstacle : config.static_obstacles) {
    boxes.push_back({obstacle.actor_id, {obstacle.pose, obstacle.body}});
  }
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    for (std::size_t j = i + 1; j < boxes.size(); ++j) {
      if (sim::boxes_intersect(boxes[i].box, boxes[j].box)) {
        add(
          ViolationCode::InitialOverlap, {boxes[i].actor_id, boxes[j].actor_id},
          "initial boxes of " + boxes[i].actor_id + " and " + boxes[j].actor_id + " overlap");
      }
    }
  }
  return out;
}

MutationSpace MutationSpace::full()
{
  MutationSpace space;
  space.waypoint_offsets = true;
  space.segment_speeds = true;
  space.spawn_delays = true;
  return space;
}

ParameterVector flatten(const ScenarioConfig & config, const MutationSpace & space, const maps::LaneMap & map)
{
  for (const auto & lane_id : {config.ego.start_lane, config.ego.end_lane}) {
    if (!map.contains(lane_id)) {
      throw ScenarioError("scenario references lane " + lane_id + " absent from map " + map.name());
    }
  }
  ParameterVector vec;
  auto push = [&vec](GeneRef ref, double value, GeneBounds bounds) {
    vec.values.push_back(std::clamp(value, bounds.low, bounds.high));
    vec.bounds.push_back(bounds);
    vec.layout.push_back(ref);
  };
  for (std::size_t n = 0; n < config.npc_vehicles.size(); ++n) {
    const auto & npc = config.npc_vehicles[n];
    if (space.waypoint_offsets) {
      for (std::size_t k = 0; k < npc.waypoints.size(); ++k) {
        const double offset = maps::project(map, npc.waypoints[k].position()).lateral_offset;
        push({GeneField::WaypointOffset, n, k}, offset, space.offset_bounds);
      }
    }
    if (space.segment_speeds) {
      for (std::size_t k = 0; k < npc.target_speeds.size(); ++k) {
        push({GeneField::SegmentSpeed, n, k}, npc.target_speeds[k], space.speed_bounds);
      }
    }
    if (space.spawn_delays) {
      push({GeneField::SpawnDelay, n, 0}, npc.spawn_delay, space.delay_bounds);
    }
  }
  return vec;
}

UnflattenResult unflatten(const ParameterVector & vector, const ScenarioConfig & base, const maps::LaneMap & map)
{
  if (vector.values.size() != vector.bounds.size() || vector.values.size() != vector.layout.size()) {
    throw ScenarioError("parameter vector layout mismatch: inconsistent lengths");
  }
  UnflattenResult result{base, false, {}};
  for (std::size_t i = 0; i < vector.values.size(); ++i) {
    const GeneRef & ref = vector.layout[i];
    if (ref.npc >= result.config.npc_vehicles.size()) {
      throw ScenarioError("parameter vector layout mismatch: no NPC #" + std::to_string(ref.npc));
    }
    auto & npc = result.config.npc_vehicles[ref.npc];
    double value = vector.values[i];
    const GeneBounds b = vector.bounds[i];
    if (!(value >= b.low && value <= b.high)) {
      value = std::isnan(value) ? b.low : std::clamp(value, b.low, b.high);
      result.repaired = true;
      result.clamped.push_back(i);
    }
    switch (ref.field) {
      case GeneField::WaypointOffset: {
        if (ref.index >= npc.waypoints.size()) {
          throw ScenarioError("parameter vector layout mismatch: waypoint index out of range");
        }
        Pose & wp = npc.waypoints[ref.index];
        const double current = maps::project(map, base.npc_vehicles[ref.npc].waypoints[ref.index].position()).lateral_offset;
        const double shift = value - current;
        if (shift != 0.0) {
          wp.x += -std::sin(wp.heading) * shift;
          wp.y += std::cos(wp.heading) * shift;
        }
        break;
      }
      case GeneField::SegmentSpeed:
        if (ref.index >= npc.target_speeds.size()) {
          throw ScenarioError("parameter vector layout mismatch: segment index out of range");
        }
        npc.target_speeds[ref.index] = value;
        break;
      case GeneField::SpawnDelay:
        npc.spawn_delay = value;
        break;
    }
  }
  return result;
}

}  // namespace scenofuzz::scenario
