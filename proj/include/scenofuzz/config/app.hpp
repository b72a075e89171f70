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

#ifndef SCENOFUZZ__CONFIG__APP_HPP_
#define SCENOFUZZ__CONFIG__APP_HPP_

#include "scenofuzz/bridge/ego_agent.hpp"
#include "scenofuzz/config/test_config.hpp"
#include "scenofuzz/engine/campaign.hpp"

#include <atomic>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace scenofuzz::config
{

inline constexpr const char * kOutputRootEnv = "SCENOFUZZ_OUTPUT_ROOT";

/// <config_dir>/<name>.yaml
std::filesystem::path config_path(const std::filesystem::path & config_dir, const std::string & name);

/// Finds <map_name>.json in the first existing directory of `search_dirs`;
/// when absent, <map_name>_lite.json is accepted with a warning.
maps::LaneMap resolve_map(
  const std::string & map_name, const std::vector<std::filesystem::path> & search_dirs,
  std::vector<std::string> * warnings = nullptr);

/// Template with one NPC per entry lane (a lane without predecessors) other
/// than the ego's, driving straight through the network.
scenario::ScenarioConfig generate_template(
  const maps::LaneMap & map, const std::string & start_lane, const std::string & end_lane,
  std::optional<double> start_station, std::optional<double> end_station, double duration_limit);

/// Agent configuration for the ego mission of `config`.
bridge::EgoAgentConfig make_agent_config(
  const scenario::ScenarioConfig & config, const maps::LaneMap & map, const AgentSection & agent);

/// Keeps a TCP agent server alive for the lifetime of the factory it backs.
struct AgentBinding
{
  runner::SessionFactory factory;
  std::shared_ptr<bridge::ServerHandle> server;
  std::string endpoint;  ///< empty for private in-process sessions
};

/// Sessions reach the agent through SCENOFUZZ_BRIDGE_ADDR when set;
/// otherwise through a private in-process channel or a local TCP server.
AgentBinding make_agent_binding(const bridge::EgoAgentConfig & agent, Transport transport);

struct Workspace
{
  TestConfig config;
  std::filesystem::path config_dir;
  maps::LaneMap map;
  scenario::ScenarioConfig base;
  AgentBinding agent;
  std::vector<std::string> warnings;
};

/// Loads the map and template named by `config`. Relative paths resolve
/// against the working directory, then the config directory's parent.
Workspace prepare_workspace(const TestConfig & config, const std::filesystem::path & config_dir);

engine::ScenarioProblemSpec make_problem_spec(const Workspace & ws);

struct RunRequest
{
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::optional<std::size_t> max_evaluations;
  std::optional<std::string> run_id;
  std::optional<std::filesystem::path> output_root;
  std::optional<bool> resume;
  const std::atomic<bool> * stop{nullptr};
  std::function<void(const engine::LogEntry &)> on_logged;
};

/// "<UTC yyyymmddThhmmssZ>_s<seed>"
std::string make_run_id(std::uint64_t seed);

/// Most recent run directory under `output_root` holding a checkpoint.
std::optional<std::string> latest_run_id(const std::filesystem::path & output_root);

engine::CampaignResult run_test(const Workspace & ws, const RunRequest & request);

/// Plan view of a recording: lanes, actor boxes once per second, the ego
/// path and a collision marker. Output is a pure function of the inputs.
std::string export_svg(const runner::ScenarioRecording & rec, const maps::LaneMap & map);

}  // namespace scenofuzz::config

#endif  // SCENOFUZZ__CONFIG__APP_HPP_
