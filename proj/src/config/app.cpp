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

#include "scenofuzz/config/app.hpp"

#include "scenofuzz/sim/collision.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <limits>
#include <set>
#include <thread>

namespace scenofuzz::config
{
namespace
{

constexpr double kApproachMargin = 5.0;  // m between junction waypoints and the lane ends
constexpr double kTemplateNpcSpeed = 8.0;

std::vector<std::filesystem::path> candidate_paths(
  const std::filesystem::path & relative, const std::filesystem::path & config_dir)
{
  if (relative.is_absolute()) {
    return {relative};
  }
  std::vector<std::filesystem::path> out{relative};
  if (!config_dir.empty()) {
    out.push_back(config_dir.parent_path() / relative);
    out.push_back(config_dir / relative);
  }
#ifdef SCENOFUZZ_SOURCE_DIR
  out.push_back(std::filesystem::path(SCENOFUZZ_SOURCE_DIR) / relative);
#endif
  return out;
}

std::optional<std::filesystem::path> first_existing(const std::vector<std::filesystem::path> & paths)
{
  for (const auto & p : paths) {
    if (std::filesystem::exists(p)) {
      return p;
    }
  }
  return std::nullopt;
}

double end_heading(const maps::Lane & lane) { return lane.centerline.heading_at(lane.length()); }

std::string fmt(double v)
{
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.3f", v);
  std::string s = buffer;
  return s == "-0.000" ? "0.000" : s;
}

}  // namespace

std::filesystem::path config_path(const std::filesystem::path & config_dir, const std::string & name)
{
  return config_dir / (name + ".yaml");
}

maps::LaneMap resolve_map(
  const std::string & map_name, const std::vector<std::filesystem::path> & search_dirs,
  std::vector<std::string> * warnings)
{
  for (const auto & dir : search_dirs) {
    const auto exact = dir / (map_name + ".json");
    if (std::filesystem::exists(exact)) {
      return maps::load_map(exact);
    }
  }
  for (const auto & dir : search_dirs) {
    const auto lite = dir / (map_name + "_lite.json");
    if (std::filesystem::exists(lite)) {
      if (warnings != nullptr) {
        warnings->push_back("map '" + map_name + "' not found; using its reduced fixture " + lite.filename().string());
      }
      return maps::load_map(lite);
    }
  }
  std::string searched;
  for (const auto & dir : search_dirs) {
    searched += (searched.empty() ? "" : ", ") + dir.string();
  }
  throw maps::MapError(maps::MapError::Kind::MissingFile, "", "map '" + map_name + "' not found in " + searched);
}

scenario::ScenarioConfig generate_template(
  const maps::LaneMap & map, const std::string & start_lane, const std::string & end_lane,
  std::optional<double> start_station, std::optional<double> end_station, double duration_limit)
{
  scenario::ScenarioConfig cfg;
  cfg.scenario_id = "template";
  cfg.map_name = map.name();
  cfg.duration_limit = duration_limit;
  cfg.ego.start_lane = start_lane;
  cfg.ego.end_lane = end_lane;
  cfg.ego.start_station = start_station.value_or(0.0);
  cfg.ego.end_station = end_station.value_or(map.lane(end_lane).length());

  for (const auto & [id, lane] : map.lanes()) {
    if (!lane.predecessors.empty() || id == start_lane) {
      continue;
    }
    // Follow the straightest successor until the network ends.
    std::vector<std::string> path{id};
    std::set<std::string> visited{id};
    while (true) {
      const maps::Lane & current = map.lane(path.back());
      std::string best;
      double best_turn = std::numeric_limits<double>::infinity();
      for (const auto & next : current.successors) {
        const double turn = std::abs(maps::normalize_angle(end_heading(map.lane(next)) - end_heading(current)));
        if (turn < best_turn && visited.count(next) == 0) {
          best_turn = turn;
          best = next;
        }
      }
      if (best.empty()) {
        break;
      }
      path.push_back(best);
      visited.insert(best);
    }
    if (path.size() < 2) {
      continue;
    }
    const maps::Lane & entry = map.lane(path.front());
    const maps::Lane & exit = map.lane(path.back());
    scenario::NpcSpec npc;
    npc.actor_id = "npc_" + id;
    npc.waypoints = {
      entry.centerline.pose_at(0.0),
      entry.centerline.pose_at(std::max(entry.length() - kApproachMargin, 0.5 * entry.length())),
      exit.centerline.pose_at(std::min(kApproachMargin, 0.5 * exit.length())),
      exit.centerline.pose_at(exit.length()),
    };
    npc.target_speeds.assign(npc.waypoints.size() - 1, kTemplateNpcSpeed);
    cfg.npc_vehicles.push_back(std::move(npc));
  }
  return cfg;
}

bridge::EgoAgentConfig make_agent_config(
  const scenario::ScenarioConfig & config, const maps::LaneMap & map, const AgentSection & agent)
{
  const maps::Route full = maps::route(map, config.ego.start_lane, config.ego.end_lane);
  const double start_s = maps::route_station(map, full, config.ego.start_lane, config.ego.start_station);
  const double end_s = maps::route_station(map, full, config.ego.end_lane, config.ego.end_station);
  bridge::EgoAgentConfig out;
  out.route = maps::clip_route(full, start_s, end_s);
  out.cruise_speed = agent.cruise_speed;
  out.fault_ignore_obstacles = agent.fault_ignore_obstacles;
  out.fault_ignore_junction_traffic = agent.fault_ignore_junction_traffic;
  return out;
}

AgentBinding make_agent_binding(const bridge::EgoAgentConfig & agent, Transport transport)
{
  AgentBinding binding;
  const char * external = std::getenv(bridge::kBridgeAddrEnv);
  if (external != nullptr && *external != '\0') {
    binding.endpoint = external;
  } else if (transport == Transport::Tcp) {
    binding.server = bridge::serve("tcp://127.0.0.1:0", bridge::ego_agent_factory(agent));
    binding.endpoint = binding.server->endpoint();
  }
  if (binding.endpoint.empty()) {
    const bridge::AgentHandlerFactory handlers = bridge::ego_agent_factory(agent);
    binding.factory = [handlers](const scenario::ScenarioConfig &, const maps::LaneMap &) {
      return bridge::connect_in_process(handlers());
    };
  } else {
    binding.factory = [endpoint = binding.endpoint, server = binding.server](
                        const scenario::ScenarioConfig &, const maps::LaneMap &) { return bridge::connect(endpoint); };
  }
  return binding;
}

Workspace prepare_workspace(const TestConfig & config, const std::filesystem::path & config_dir)
{
  Workspace ws;
  ws.config = config;
  ws.config_dir = config_dir;
  std::vector<std::filesystem::path> map_dirs;
  for (const auto & p : candidate_paths(config.system.map_dir, config_dir)) {
    if (std::filesystem::is_directory(p)) {
      map_dirs.push_back(p);
    }
  }
  if (map_dirs.empty()) {
    throw ConfigError("system.map_dir", "directory '" + config.system.map_dir + "' not found");
  }
  try {
    ws.map = resolve_map(config.scenario.map_name, map_dirs, &ws.warnings);
  } catch (const maps::MapError & e) {
    throw ConfigError("scenario.map_name", e.what());
  }
  for (const auto & [key, lane] :
       {std::pair{"scenario.start_lane_id", config.scenario.start_lane_id},
        std::pair{"scenario.end_lane_id", config.scenario.end_lane_id}}) {
    if (!ws.map.contains(lane)) {
      throw ConfigError(key, "lane '" + lane + "' is not in map " + ws.map.name());
    }
  }

  if (config.scenario.template_path) {
    const auto found = first_existing(candidate_paths(*config.scenario.template_path, config_dir));
    if (!found) {
      throw ConfigError("scenario.template", "file '" + *config.scenario.template_path + "' not found");
    }
    ws.base = scenario::load_scenario(*found);
    ws.base.map_name = ws.map.name();
    ws.base.ego.start_lane = config.scenario.start_lane_id;
    ws.base.ego.end_lane = config.scenario.end_lane_id;
    if (config.scenario.start_station) {
      ws.base.ego.start_station = *config.scenario.start_station;
    }
    if (config.scenario.end_station) {
      ws.base.ego.end_station = *config.scenario.end_station;
    }
    ws.base.duration_limit = config.scenario.duration_limit;
  } else {
    ws.base = generate_template(
      ws.map, config.scenario.start_lane_id, config.scenario.end_lane_id, config.scenario.start_station,
      config.scenario.end_station, config.scenario.duration_limit);
  }
  const auto violations = scenario::validate(ws.base, ws.map);
  if (!violations.empty()) {
    throw ConfigError("scenario", "template scenario is not executable: " + violations.front().message);
  }

  try {
    ws.agent = make_agent_binding(make_agent_config(ws.base, ws.map, config.scenario_runner.agent),
                                  config.scenario_runner.agent.transport);
  } catch (const maps::MapError & e) {
    throw ConfigError("scenario", e.what());
  }
  return ws;
}

engine::ScenarioProblemSpec make_problem_spec(const Workspace & ws)
{
  engine::ScenarioProblemSpec spec;
  spec.base = ws.base;
  spec.map = ws.map;
  spec.space = ws.config.scenario.mutation_space;
  spec.oracles = ws.config.testing_engine.oracle;
  spec.run.dt = ws.config.scenario_runner.dt;
  spec.agent = ws.agent.factory;
  spec.save_traffic_recording = ws.config.scenario_runner.save_traffic_recording;
  return spec;
}

std::string make_run_id(std::uint64_t seed)
{
  const std::time_t now = std::time(nullptr);
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y%m%dT%H%M%SZ", &utc);
  return std::string(buffer) + "_s" + std::to_string(seed);
}

std::optional<std::string> latest_run_id(const std::filesystem::path & output_root)
{
  if (!std::filesystem::is_directory(output_root)) {
    return std::nullopt;
  }
  std::optional<std::string> best;
  for (const auto & entry : std::filesystem::directory_iterator(output_root)) {
    if (entry.is_directory() && std::filesystem::exists(entry.path() / engine::kStateFileName)) {
      const std::string name = entry.path().filename().string();
      if (!best || name > *best) {
        best = name;
      }
    }
  }
  return best;
}

engine::CampaignResult run_test(const Workspace & ws, const RunRequest & request)
{
  const TestConfig & cfg = ws.config;
  engine::CampaignSettings settings;
  settings.algorithm = cfg.testing_engine.algorithm;
  settings.seed = request.seed.value_or(cfg.system.seed.value_or(0));
  settings.workers = request.workers.value_or(
    cfg.scenario_runner.worker_pool.value_or(std::max<std::size_t>(1, std::thread::hardware_concurrency())));
  if (settings.workers == 0) {
    throw ConfigError("workers", "must be at least 1");
  }
  settings.max_evaluations = request.max_evaluations;
  settings.stop = request.stop;
  settings.on_logged = request.on_logged;

  if (request.output_root) {
    settings.output_root = *request.output_root;
  } else if (const char * env = std::getenv(kOutputRootEnv); env != nullptr && *env != '\0') {
    settings.output_root = env;
  } else {
    settings.output_root = cfg.system.output_root;
  }

  settings.resume = request.resume.value_or(cfg.system.resume);
  if (request.run_id) {
    settings.run_id = *request.run_id;
  } else if (settings.resume) {
    if (auto latest = latest_run_id(settings.output_root)) {
      settings.run_id = *latest;
    }
  }
  if (settings.run_id.empty()) {
    settings.run_id = make_run_id(settings.seed);
    for (int k = 2; std::filesystem::exists(settings.output_root / settings.run_id); ++k) {
      settings.run_id = make_run_id(settings.seed) + "_" + std::to_string(k);
    }
  }
  const engine::ScenarioProblem problem(make_problem_spec(ws));
  return engine::run_campaign(settings, problem);
}

std::string export_svg(const runner::ScenarioRecording & rec, const maps::LaneMap & map)
{
  double min_x = std::numeric_limits<double>::infinity();
  double min_y = min_x;
  double max_x = -min_x;
  double max_y = -min_x;
  const auto extend = [&](maps::Point2 p) {
    min_x = std::min(min_x, p.x);
    min_y = std::min(min_y, p.y);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  };
  for (const auto & [id, lane] : map.lanes()) {
    for (const auto & p : lane.centerline.points()) {
      extend(p);
    }
  }
  for (const auto & frame : rec.frames) {
    for (const auto & actor : frame.actors) {
      extend(actor.pose.position());
    }
  }
  if (!std::isfinite(min_x)) {
    min_x = min_y = 0.0;
    max_x = max_y = 1.0;
  }
  constexpr double kMargin = 5.0;
  min_x -= kMargin;
  min_y -= kMargin;
  max_x += kMargin;
  max_y += kMargin;
  const auto sx = [&](double x) { return fmt(x - min_x); };
  const auto sy = [&](double y) { return fmt(max_y - y); };
  const auto point = [&](maps::Point2 p) { return sx(p.x) + "," + sy(p.y); };

  std::string svg;
  const double width = max_x - min_x;
  const double height = max_y - min_y;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(width * 8.0) + "\" height=\"" +
         fmt(height * 8.0) + "\" viewBox=\"0 0 " + fmt(width) + " " + fmt(height) + "\">\n";
  svg += "<title>" + rec.scenario_id + " " + runner::to_string(rec.verdict.outcome) + "</title>\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + fmt(width) + "\" height=\"" + fmt(height) + "\" fill=\"#ffffff\"/>\n";

  svg += "<g class=\"lanes\" fill=\"none\" stroke=\"#9e9e9e\" stroke-width=\"0.3\">\n";
  for (const auto & [id, lane] : map.lanes()) {
    svg += "<polyline data-lane=\"" + id + "\" points=\"";
    bool first = true;
    for (const auto & p : lane.centerline.points()) {
      svg += (first ? "" : " ") + point(p);
      first = false;
    }
    svg += "\"/>\n";
  }
  svg += "</g>\n";

  svg += "<g class=\"boxes\" fill=\"none\" stroke-width=\"0.2\">\n";
  long last_second = -1;
  for (const auto & frame : rec.frames) {
    const long second = static_cast<long>(std::floor(frame.sim_time + 1e-9));
    if (second <= last_second) {
      continue;
    }
    last_second = second;
    for (const auto & actor : frame.actors) {
      const char * color = actor.kind == sim::ActorKind::Ego ? "#1565c0"
                           : actor.kind == sim::ActorKind::Npc ? "#ef6c00"
                                                                : "#616161";
      svg += "<polygon class=\"box\" data-actor=\"" + actor.actor_id + "\" data-t=\"" + fmt(frame.sim_time) +
             "\" stroke=\"" + color + "\" points=\"";
      const auto corners = sim::OrientedBox{actor.pose, actor.body}.corners();
      for (std::size_t i = 0; i < corners.size(); ++i) {
        svg += (i == 0 ? "" : " ") + point(corners[i]);
      }
      svg += "\"/>\n";
    }
  }
  svg += "</g>\n";

  std::vector<maps::Point2> path;
  for (const auto & frame : rec.frames) {
    for (const auto & actor : frame.actors) {
      if (actor.kind == sim::ActorKind::Ego) {
        path.push_back(actor.pose.position());
        break;
      }
    }
  }
  if (path.size() >= 2) {
    svg += "<polyline class=\"ego-path\" fill=\"none\" stroke=\"#1565c0\" stroke-width=\"0.25\" points=\"";
    for (std::size_t i = 0; i < path.size(); ++i) {
      svg += (i == 0 ? "" : " ") + point(path[i]);
    }
    svg += "\"/>\n";
  }
  if (rec.verdict.outcome == runner::Outcome::CollisionViolation && !path.empty()) {
    svg += "<circle class=\"collision\" cx=\"" + sx(path.back().x) + "\" cy=\"" + sy(path.back().y) +
           "\" r=\"1.500\" fill=\"none\" stroke=\"#c62828\" stroke-width=\"0.4\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace scenofuzz::config
