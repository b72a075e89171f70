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

#ifndef SCENOFUZZ__MAPS__LANE_MAP_HPP_
#define SCENOFUZZ__MAPS__LANE_MAP_HPP_

#include "scenofuzz/common/json.hpp"
#include "scenofuzz/maps/geometry.hpp"

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace scenofuzz::maps
{

class MapError : public std::runtime_error
{
public:
  enum class Kind { MissingFile, Malformed, DanglingReference, UnknownLane, NoRoute, InvalidArgument };

  MapError(Kind kind, std::string lane_id, const std::string & what)
  : std::runtime_error(what), kind_(kind), lane_id_(std::move(lane_id))
  {
  }

  Kind kind() const noexcept { return kind_; }
  /// Offending lane id, empty when the error is not lane-specific.
  const std::string & lane_id() const noexcept { return lane_id_; }

private:
  Kind kind_;
  std::string lane_id_;
};

struct Lane
{
  std::string id;
  Polyline centerline;
  double width{3.5};
  std::vector<std::string> successors;
  std::vector<std::string> predecessors;

  double length() const { return centerline.length(); }
};

/// Immutable lane-level map. Lanes are kept in lane-id order, which is also
/// the tie-break order for every query.
class LaneMap
{
public:
  LaneMap() = default;

  /// Validates all invariants (dangling references, centerline spacing,
  /// positive width) and throws MapError on the first violation.
  LaneMap(std::string name, std::vector<Lane> lanes);

  static LaneMap from_json(const Json & doc);
  Json to_json() const;

  const std::string & name() const { return name_; }
  const std::map<std::string, Lane> & lanes() const { return lanes_; }
  bool contains(const std::string & lane_id) const { return lanes_.count(lane_id) != 0; }

  /// Throws MapError(UnknownLane) when absent.
  const Lane & lane(const std::string & lane_id) const;

private:
  std::string name_;
  std::map<std::string, Lane> lanes_;
};

LaneMap load_map(const std::filesystem::path & path);

struct Route
{
  std::vector<std::string> lane_sequence;
  Polyline stitched_centerline;
  double total_length{0.0};
};

/// Shortest route by arc length over successor links. Routes of equal
/// length (within 1e-9 m) are ordered by their lane-id sequence.
Route route(const LaneMap & map, const std::string & start_lane, const std::string & end_lane);

/// Route trimmed to [start_s, end_s] measured along its stitched centerline.
Route clip_route(const Route & route, double start_s, double end_s);

/// Arc length along a route of the given station on one of its lanes.
double route_station(const LaneMap & map, const Route & route, const std::string & lane_id, double station);

struct LaneProjection
{
  std::string lane_id;
  double s{0.0};
  double lateral_offset{0.0};
  double distance{0.0};
};

/// Nearest lane centerline to `point`; lane-id order breaks ties.
LaneProjection project(const LaneMap & map, Point2 point);

/// Poses every `spacing` meters along the route, plus the route end.
std::vector<Pose> sample_route(const Route & route, double spacing);

}  // namespace scenofuzz::maps

#endif  // SCENOFUZZ__MAPS__LANE_MAP_HPP_
