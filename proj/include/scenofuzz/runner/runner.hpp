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

#ifndef SCENOFUZZ__RUNNER__RUNNER_HPP_
#define SCENOFUZZ__RUNNER__RUNNER_HPP_

#include "scenofuzz/bridge/transport.hpp"
#include "scenofuzz/common/json.hpp"
#include "scenofuzz/maps/lane_map.hpp"
#include "scenofuzz/scenario/scenario.hpp"
#include "scenofuzz/sim/types.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace scenofuzz::runner
{

struct OracleConfig
{
  double collision_threshold{0.01};   ///< m of OBB separation
  double destination_tolerance{3.0};  ///< m
  double stuck_speed{0.3};            ///< m/s
  double stuck_duration{30.0};        ///< s

  friend bool operator==(const OracleConfig &, const OracleConfig &) = default;
};

/// Speed below which an ego inside the destination tolerance counts as arrived.
inline constexpr double kArrivalSpeed = 0.5;

enum class Outcome { CollisionViolation, DestinationReached, Timeout, Stuck, AgentTimeout };

const char * to_string(Outcome outcome);
Outcome outcome_from_string(const std::string & text);

struct Verdict
{
  Outcome outcome{Outcome::Timeout};
  double time_of_decision{0.0};
  Json details = Json::object();

  friend bool operator==(const Verdict &, const Verdict &) = default;
};

struct Frame
{
  double sim_time{0.0};
  std::vector<sim::ActorState> actors;
  /// Absent on the deciding frame and after a bridge failure.
  std::optional<sim::ControlCommand> ego_command;

  friend bool operator==(const Frame &, const Frame &) = default;
};

/// Non-verdict event worth keeping with the trace (NPC-NPC contact).
struct Annotation
{
  double sim_time{0.0};
  std::string kind;
  std::vector<std::string> actors;
  double distance{0.0};

  friend bool operator==(const Annotation &, const Annotation &) = default;
};

struct ScenarioRecording
{
  std::string scenario_id;
  scenario::ScenarioConfig config_snapshot;
  std::vector<Frame> frames;
  std::vector<Annotation> annotations;
  Verdict verdict;
  double wall_clock{0.0};  ///< s
  std::uint64_t rng_seed{0};

  friend bool operator==(const ScenarioRecording &, const ScenarioRecording &) = default;
};

struct CollisionHit
{
  std::string ego_id;
  std::string other_id;
  double distance{0.0};
};

/// Fires iff some (ego, other) pair is within `threshold`; reports the
/// minimizing pair (first in actor order on ties).
std::optional<CollisionHit> check_collision(const sim::WorldState & world, double threshold);

/// Distance to `goal` when the ego is within `tolerance` of it and slower
/// than kArrivalSpeed.
std::optional<double> check_destination(const sim::WorldState & world, maps::Point2 goal, double tolerance);

using SessionFactory =
  std::function<std::unique_ptr<bridge::AgentSession>(const scenario::ScenarioConfig &, const maps::LaneMap &)>;

struct RunOptions
{
  double dt{sim::kDefaultDt};
  sim::VehicleParams params{};
  std::chrono::milliseconds response_timeout{bridge::kDefaultResponseTimeout};
};

class RunnerError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Initial world: ego first, then NPCs and static obstacles in config order.
sim::WorldState initial_world(const scenario::ScenarioConfig & config, const maps::LaneMap & map);

/// Throws RunnerError when validate() reports violations.
ScenarioRecording run_scenario(
  const scenario::ScenarioConfig & config, const maps::LaneMap & map, const SessionFactory & agent,
  const OracleConfig & oracles, std::uint64_t seed, const RunOptions & options = {});

Json recording_to_json(const ScenarioRecording & rec);
ScenarioRecording recording_from_json(const Json & doc);

/// Copy with frames and annotations dropped, kept when traces are not saved.
ScenarioRecording summarize(const ScenarioRecording & rec);

std::filesystem::path recording_path(const std::filesystem::path & directory, const std::string & scenario_id);

/// Writes canonical JSON to <directory>/<scenario_id>.record.json.
std::filesystem::path write_recording(const ScenarioRecording & rec, const std::filesystem::path & directory);

/// Throws SchemaError on malformed or truncated files.
ScenarioRecording read_recording(const std::filesystem::path & path);

}  // namespace scenofuzz::runner

#endif  // SCENOFUZZ__RUNNER__RUNNER_HPP_
