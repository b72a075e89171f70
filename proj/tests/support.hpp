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

#ifndef SCENOFUZZ__TESTS__SUPPORT_HPP_
#define SCENOFUZZ__TESTS__SUPPORT_HPP_

#include "scenofuzz/config/app.hpp"

#include <cstdlib>
#include <filesystem>
#include <memory>
#include <string>
#include <unistd.h>

namespace scenofuzz::testing
{

inline std::filesystem::path source_dir() { return SCENOFUZZ_SOURCE_DIR; }

inline std::filesystem::path map_path(const std::string & name)
{
  return source_dir() / "data" / "maps" / (name + ".json");
}

inline maps::LaneMap fixture_map(const std::string & name) { return maps::load_map(map_path(name)); }

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir
{
public:
  explicit TempDir(const std::string & tag)
  {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("scenofuzz_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir()
  {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir &) = delete;
  TempDir & operator=(const TempDir &) = delete;
  const std::filesystem::path & path() const { return path_; }

private:
  std::filesystem::path path_;
};

/// Left turn lane_31 -> lane_15 on the junction map with one NPC per other
/// approach lane.
inline scenario::ScenarioConfig junction_scenario(const maps::LaneMap & map)
{
  auto config = config::generate_template(map, "lane_31", "lane_15", std::nullopt, std::nullopt, 40.0);
  config.scenario_id = "junction";
  return config;
}

inline runner::SessionFactory reference_agent(
  const scenario::ScenarioConfig & config, const maps::LaneMap & map, bool ignore_obstacles = false,
  bool ignore_junction = false, config::Transport transport = config::Transport::InProcess)
{
  config::AgentSection section;
  section.fault_ignore_obstacles = ignore_obstacles;
  section.fault_ignore_junction_traffic = ignore_junction;
  const auto agent = config::make_agent_config(config, map, section);
  return config::make_agent_binding(agent, transport).factory;
}

/// Straight 200 m road with the ego driving from s = 10 to s = 60.
inline scenario::ScenarioConfig straight_scenario()
{
  scenario::ScenarioConfig config;
  config.scenario_id = "straight";
  config.map_name = "straight_road";
  config.ego.start_lane = "lane_1";
  config.ego.start_station = 10.0;
  config.ego.end_lane = "lane_1";
  config.ego.end_station = 60.0;
  config.duration_limit = 40.0;
  return config;
}

}  // namespace scenofuzz::testing

#endif  // SCENOFUZZ__TESTS__SUPPORT_HPP_
