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

#include "scenofuzz/runner/runner.hpp"

#include "scenofuzz/bridge/messages.hpp"
#include "scenofuzz/sim/collision.hpp"
#include "scenofuzz/sim/controllers.hpp"
#include "scenofuzz/sim/dynamics.hpp"

#include <chrono>
#include <set>
#include <utility>

namespace scenofuzz::runner
{
namespace
{

constexpr double kTimeEpsilon = 1e-9;

constexpr std::pair<Outcome, const char *> kOutcomeNames[] = {
  {Outcome::CollisionViolation, "CollisionViolation"},
  {Outcome::DestinationReached, "DestinationReached"},
  {Outcome::Timeout, "Timeout"},
  {Outcome::Stuck, "Stuck"},
  {Outcome::AgentTimeout, "AgentTimeout"},
};

Verdict make_verdict(Outcome outcome, double t, Json details)
{
  Verdict v;
  v.outcome = outcome;
  v.time_of_decision = t;
  v.details = std::move(details);
  return v;
}

}  // namespace

const char * to_string(Outcome outcome)
{
  for (const auto & [value, name] : kOutcomeNames) {
    if (value == outcome) {
      return name;
    }
  }
  return "Timeout";
}

Outcome outcome_from_string(const std::string & text)
{
  for (const auto & [value, name] : kOutcomeNames) {
    if (text == name) {
      return value;
    }
  }
  throw std::invalid_argument("unknown outcome: " + text);
}

std::optional<CollisionHit> check_collision(const sim::WorldState & world, double threshold)
{
  std::optional<CollisionHit> best;
  for (const auto & ego : world.actors) {
    if (ego.kind != sim::ActorKind::Ego) {
      continue;
    }
    for (const auto & other : world.actors) {
      if (&other == &ego) {
        continue;
      }
      const double d = sim::obb_distance(ego, other);
      if (d <= threshold && (!best || d < best->distance)) {
        best = CollisionHit{ego.actor_id, other.actor_id, d};
      }
    }
  }
  return best;
}

std::optional<double> check_destination(const sim::WorldState & world, maps::Point2 goal, double tolerance)
{
  const sim::ActorState & ego = world.ego();
  const double d = maps::distance(ego.pose.position(), goal);
  if (d <= tolerance && ego.speed < kArrivalSpeed) {
    return d;
  }
  return std::nullopt;
}

sim::WorldState initial_world(const scenario::ScenarioConfig & config, const maps::LaneMap & map)
{
  sim::WorldState world;
  sim::ActorState ego;
  ego.actor_id = scenario::kEgoActorId;
  ego.kind = sim::ActorKind::Ego;
  ego.pose = scenario::ego_start_pose(config, map);
  ego.body = config.ego.body;
  world.actors.push_back(ego);
  for (const auto & npc : config.npc_vehicles) {
    sim::ActorState actor;
    actor.actor_id = npc.actor_id;
    actor.kind = sim::ActorKind::Npc;
    actor.pose = npc.waypoints.front();
    actor.body = npc.body;
    world.actors.push_back(actor);
  }
  for (const auto & obstacle : config.static_obstacles) {
    sim::ActorState actor;
    actor.actor_id = obstacle.actor_id;
    actor.kind = sim::ActorKind::Static;
    actor.pose = obstacle.pose;
    actor.body = obstacle.body;
    world.actors.push_back(actor);
  }
  return world;
}

ScenarioRecording run_scenario(
  const scenario::ScenarioConfig & config, const maps::LaneMap & map, const SessionFactory & agent,
  const OracleConfig & oracles, std::uint64_t seed, const RunOptions & options)
{
  const auto violations = scenario::validate(config, map);
  if (!violations.empty()) {
    std::string what = "scenario " + config.scenario_id + " is not executable:";
    for (const auto & v : violations) {
      what += std::string(" [") + scenario::to_string(v.code) + "] " + v.message;
    }
    throw RunnerError(what);
  }
  if (!(options.dt > 0.0)) {
    throw RunnerError("dt must be positive");
  }

  const auto started = std::chrono::steady_clock::now();
  ScenarioRecording rec;
  rec.scenario_id = config.scenario_id;
  rec.config_snapshot = config;
  rec.rng_seed = seed;

  const maps::Point2 goal = scenario::ego_goal_point(config, map);
  std::vector<sim::NpcController> controllers;
  controllers.reserve(config.npc_vehicles.size());
  for (const auto & npc : config.npc_vehicles) {
    controllers.emplace_back(npc);
  }

  std::unique_ptr<bridge::AgentSession> session;
  std::string session_error;
  try {
    session = agent(config, map);
    if (!session) {
      session_error = "agent factory returned no session";
    }
  } catch (const std::exception & e) {
    session_error = e.what();
  }

  sim::WorldState world = initial_world(config, map);
  double slow_since = 0.0;
  std::set<std::pair<std::string, std::string>> npc_contacts;

  while (true) {
    const double t = world.sim_time;
    const sim::ActorState & ego = world.ego();
    if (ego.speed >= oracles.stuck_speed) {
      slow_since = t;
    }

    std::optional<Verdict> verdict;
    if (auto hit = check_collision(world, oracles.collision_threshold)) {
      verdict = make_verdict(
        Outcome::CollisionViolation, t, {{"actors", {hit->ego_id, hit->other_id}}, {"distance", hit->distance}});
    } else if (auto d = check_destination(world, goal, oracles.destination_tolerance)) {
      verdict = make_verdict(Outcome::DestinationReached, t, {{"distance", *d}, {"speed", ego.speed}});
    } else if (t - slow_since >= oracles.stuck_duration - kTimeEpsilon) {
      verdict = make_verdict(Outcome::Stuck, t, {{"stopped_for", t - slow_since}});
    } else if (t >= config.duration_limit - kTimeEpsilon) {
      verdict = make_verdict(Outcome::Timeout, t, {{"duration_limit", config.duration_limit}});
    } else if (!session) {
      verdict = make_verdict(Outcome::AgentTimeout, t, {{"error", session_error}});
    }

    for (std::size_t i = 0; i < world.actors.size(); ++i) {
      for (std::size_t j = i + 1; j < world.actors.size(); ++j) {
        const auto & a = world.actors[i];
        const auto & b = world.actors[j];
        if (a.kind == sim::ActorKind::Ego || b.kind == sim::ActorKind::Ego) {
          continue;
        }
        if (a.kind == sim::ActorKind::Static && b.kind == sim::ActorKind::Static) {
          continue;
        }
        const auto key = std::make_pair(a.actor_id, b.actor_id);
        const double d = sim::obb_distance(a, b);
        if (d <= oracles.collision_threshold) {
          if (npc_contacts.insert(key).second) {
            rec.annotations.push_back({t, "npc_contact", {a.actor_id, b.actor_id}, d});
          }
        } else {
          npc_contacts.erase(key);
        }
      }
    }

    if (verdict) {
      rec.frames.push_back({t, world.actors, std::nullopt});
      rec.verdict = std::move(*verdict);
      break;
    }

    bridge::ControlMessage reply;
    try {
      reply = session->exchange(bridge::observe(world), options.response_timeout);
    } catch (const bridge::BridgeError & e) {
      rec.frames.push_back({t, world.actors, std::nullopt});
      rec.verdict = make_verdict(Outcome::AgentTimeout, t, {{"error", e.what()}});
      break;
    }
    const sim::ControlCommand ego_cmd = sim::clamp_command(reply.command);
    rec.frames.push_back({t, world.actors, ego_cmd});

    sim::ControlMap controls;
    controls[ego.actor_id] = ego_cmd;
    for (std::size_t i = 0; i < controllers.size(); ++i) {
      const sim::ActorState & npc = world.actors[1 + i];
      controls[npc.actor_id] = controllers[i].step(npc, t, options.params, options.dt);
    }
    world = sim::step_world(world, controls, options.params, options.dt);
  }

  rec.wall_clock = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return rec;
}

namespace
{

Json frame_to_json(const Frame & frame)
{
  Json actors = Json::array();
  for (const auto & actor : frame.actors) {
    actors.push_back(sim::actor_to_json(actor));
  }
  return {
    {"sim_time", frame.sim_time},
    {"actors", actors},
    {"ego_command", frame.ego_command ? sim::command_to_json(*frame.ego_command) : Json(nullptr)},
  };
}

Frame frame_from_json(const JsonReader & r)
{
  r.expect_keys({"sim_time", "actors", "ego_command"});
  Frame frame;
  frame.sim_time = r.at("sim_time").number();
  const auto actors = r.at("actors");
  for (std::size_t i = 0; i < actors.array_size(); ++i) {
    frame.actors.push_back(sim::actor_from_json(actors.at(i)));
  }
  const auto cmd = r.at("ego_command");
  if (!cmd.is_null()) {
    frame.ego_command = sim::command_from_json(cmd);
  }
  return frame;
}

}  // namespace

Json recording_to_json(const ScenarioRecording & rec)
{
  Json frames = Json::array();
  for (const auto & frame : rec.frames) {
    frames.push_back(frame_to_json(frame));
  }
  Json annotations = Json::array();
  for (const auto & a : rec.annotations) {
    annotations.push_back({{"sim_time", a.sim_time}, {"kind", a.kind}, {"actors", a.actors}, {"distance", a.distance}});
  }
  return {
    {"schema_version", 1},
    {"scenario_id", rec.scenario_id},
    {"config", scenario::to_json(rec.config_snapshot)},
    {"frames", frames},
    {"annotations", annotations},
    {"verdict",
     {{"outcome", to_string(rec.verdict.outcome)},
      {"time_of_decision", rec.verdict.time_of_decision},
      {"details", rec.verdict.details}}},
    {"wall_clock", rec.wall_clock},
    {"rng_seed", rec.rng_seed},
  };
}

ScenarioRecording recording_from_json(const Json & doc)
{
  const JsonReader r(doc, "");
  r.expect_keys(
    {"schema_version", "scenario_id", "config", "frames", "annotations", "verdict", "wall_clock", "rng_seed"});
  if (r.at("schema_version").integer() != 1) {
    r.at("schema_version").fail("unsupported schema version");
  }
  ScenarioRecording rec;
  rec.scenario_id = r.at("scenario_id").string();
  try {
    rec.config_snapshot = scenario::from_json(doc.at("config"));
  } catch (const SchemaError & e) {
    throw SchemaError("/config" + e.path(), e.what());
  }
  const auto frames = r.at("frames");
  for (std::size_t i = 0; i < frames.array_size(); ++i) {
    rec.frames.push_back(frame_from_json(frames.at(i)));
  }
  const auto annotations = r.at("annotations");
  for (std::size_t i = 0; i < annotations.array_size(); ++i) {
    const auto a = annotations.at(i);
    a.expect_keys({"sim_time", "kind", "actors", "distance"});
    Annotation ann;
    ann.sim_time = a.at("sim_time").number();
    ann.kind = a.at("kind").string();
    const auto actors = a.at("actors");
    for (std::size_t k = 0; k < actors.array_size(); ++k) {
      ann.actors.push_back(actors.at(k).string());
    }
    ann.distance = a.at("distance").number();
    rec.annotations.push_back(std::move(ann));
  }
  const auto v = r.at("verdict");
  v.expect_keys({"outcome", "time_of_decision", "details"});
  try {
    rec.verdict.outcome = outcome_from_string(v.at("outcome").string());
  } catch (const std::invalid_argument & e) {
    v.at("outcome").fail(e.what());
  }
  rec.verdict.time_of_decision = v.at("time_of_decision").number();
  if (!v.at("details").raw().is_object()) {
    v.at("details").fail("expected an object");
  }
  rec.verdict.details = v.at("details").raw();
  rec.wall_clock = r.at("wall_clock").number();
  rec.rng_seed = r.at("rng_seed").unsigned_integer();
  return rec;
}

ScenarioRecording summarize(const ScenarioRecording & rec)
{
  ScenarioRecording summary = rec;
  summary.frames.clear();
  summary.annotations.clear();
  return summary;
}

std::filesystem::path recording_path(const std::filesystem::path & directory, const std::string & scenario_id)
{
  return directory / (scenario_id + ".record.json");
}

std::filesystem::path write_recording(const ScenarioRecording & rec, const std::filesystem::path & directory)
{
  std::filesystem::create_directories(directory);
  const auto path = recording_path(directory, rec.scenario_id);
  write_text_file_atomic(path, canonical_dump(recording_to_json(rec)) + "\n");
  return path;
}

ScenarioRecording read_recording(const std::filesystem::path & path)
{
  return recording_from_json(parse_json(read_text_file(path)));
}

}  // namespace scenofuzz::runner
