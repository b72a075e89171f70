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

#ifndef SCENOFUZZ__SCENARIO__SCENARIO_HPP_
#define SCENOFUZZ__SCENARIO__SCENARIO_HPP_

#include "scenofuzz/common/json.hpp"
#include "scenofuzz/maps/lane_map.hpp"
#include "scenofuzz/scenario/types.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace scenofuzz::scenario
{

inline constexpr int kSchemaVersion = 1;

Json pose_to_json(const Pose & pose);
Pose pose_from_json(const JsonReader & reader);
Json body_to_json(const BodyDims & body);
BodyDims body_from_json(const JsonReader & reader);

/// Scenario document; every field present, "schema_version": 1.
Json to_json(const ScenarioConfig & config);

/// Strict reader: unknown fields, missing fields and wrong types raise
/// SchemaError carrying a JSON pointer to the field.
ScenarioConfig from_json(const Json & doc);

/// Canonical text (sorted keys, 17 significant digits).
std::string to_canonical_string(const ScenarioConfig & config);

ScenarioConfig load_scenario(const std::filesystem::path & path);
void save_scenario(const ScenarioConfig & config, const std::filesystem::path & path);

/// World pose of the ego at its start station (lane tangent heading).
Pose ego_start_pose(const ScenarioConfig & config, const maps::LaneMap & map);
/// World position of the ego mission's end point.
maps::Point2 ego_goal_point(const ScenarioConfig & config, const maps::LaneMap & map);

enum class ViolationCode {
  DuplicateActorId,
  NonPositiveDuration,
  MapNameMismatch,
  UnknownLane,
  StationOutOfRange,
  NoEgoRoute,
  InvalidBody,
  TooFewWaypoints,
  SpeedCountMismatch,
  SpeedOutOfRange,
  NegativeSpawnDelay,
  InitialOverlap,
};

const char * to_string(ViolationCode code);

struct Violation
{
  ViolationCode code;
  std::vector<std::string> subjects;  ///< actor ids or lane ids involved
  std::string message;

  friend bool operator==(const Violation &, const Violation &) = default;
};

/// Every invariant violation in a fixed order; empty iff executable.
/// Never throws.
std::vector<Violation> validate(const ScenarioConfig & config, const maps::LaneMap & map);

struct GeneBounds
{
  double low{0.0};
  double high{0.0};

  friend bool operator==(const GeneBounds &, const GeneBounds &) = default;
};

/// Which scenario fields are open to mutation, and their ranges.
struct MutationSpace
{
  bool waypoint_offsets{false};
  bool segment_speeds{false};
  bool spawn_delays{false};
  GeneBounds offset_bounds{-2.0, 2.0};  ///< m, normal to waypoint heading
  GeneBounds speed_bounds{0.0, 20.0};   ///< m/s
  GeneBounds delay_bounds{0.0, 10.0};   ///< s

  static MutationSpace full();

  friend bool operator==(const MutationSpace &, const MutationSpace &) = default;
};

enum class GeneField { WaypointOffset, SegmentSpeed, SpawnDelay };

struct GeneRef
{
  GeneField field;
  std::size_t npc;    ///< index into npc_vehicles
  std::size_t index;  ///< waypoint or segment index; 0 for spawn delay

  friend bool operator==(const GeneRef &, const GeneRef &) = default;
};

struct ParameterVector
{
  std::vector<double> values;
  std::vector<GeneBounds> bounds;
  std::vector<GeneRef> layout;

  std::size_t size() const { return values.size(); }
};

class ScenarioError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Lateral offset genes are measured against the nearest map lane, so the
/// map is needed to read them back. Values outside the space bounds are
/// clamped. Throws ScenarioError when the ego mission names unknown lanes.
ParameterVector flatten(const ScenarioConfig & config, const MutationSpace & space, const maps::LaneMap & map);

struct UnflattenResult
{
  ScenarioConfig config;
  bool repaired{false};               ///< some value was clamped into bounds
  std::vector<std::size_t> clamped;   ///< indices of clamped genes
};

/// Writes the vector's values into a copy of `base`. Throws ScenarioError on
/// a layout that does not fit `base`.
UnflattenResult unflatten(const ParameterVector & vector, const ScenarioConfig & base, const maps::LaneMap & map);

}  // namespace scenofuzz::scenario

#endif  // SCENOFUZZ__SCENARIO__SCENARIO_HPP_
