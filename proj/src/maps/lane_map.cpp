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

#include "scenofuzz/maps/lane_map.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>

namespace scenofuzz::maps
{
namespace
{

constexpr double kMinVertexSpacing = 1e-3;
constexpr double kStitchTolerance = 1e-3;

std::vector<std::string> read_id_list(const JsonReader & reader)
{
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < reader.array_size(); ++i) {
    ids.push_back(reader.at(i).string());
  }
  return ids;
}

Json points_to_json(const std::vector<Point2> & points)
{
  Json out = Json::array();
  for (const auto & p : points) {
    out.push_back(Json::array({p.x, p.y}));
  }
  return out;
}

// Route cost in integer nanometers so that ordering is a strict weak order
// and equal-length alternatives compare equal.
std::int64_t cost_key(double meters) { return std::llround(meters * 1e9); }

struct Label
{
  std::int64_t cost;
  std::vector<std::string> sequence;

  bool operator>(const Label & other) const
  {
    if (cost != other.cost) return cost > other.cost;
    return sequence > other.sequence;
  }
};

}  // namespace

LaneMap::LaneMap(std::string name, std::vector<Lane> lanes) : name_(std::move(name))
{
  for (auto & lane : lanes) {
    if (lane.id.empty()) {
      throw MapError(MapError::Kind::Malformed, "", "lane with empty id");
    }
    if (!(lane.width > 0.0) || !std::isfinite(lane.width)) {
      throw MapError(MapError::Kind::Malformed, lane.id, "lane " + lane.id + " has non-positive width");
    }
    const auto & pts = lane.centerline.points();
    if (pts.size() < 2) {
      throw MapError(MapError::Kind::Malformed, lane.id, "lane " + lane.id + " needs at least 2 centerline points");
    }
    for (std::size_t i = 1; i < pts.size(); ++i) {
      if (distance(pts[i - 1], pts[i]) <= kMinVertexSpacing) {
        throw MapError(
          MapError::Kind::Malformed, lane.id,
          "lane " + lane.id + " has coincident centerline points at index " + std::to_string(i));
      }
    }
    const std::string id = lane.id;
    if (!lanes_.emplace(id, std::move(lane)).second) {
      throw MapError(MapError::Kind::Malformed, id, "duplicate lane id " + id);
    }
  }
  for (const auto & [id, lane] : lanes_) {
    for (const auto * refs : {&lane.successors, &lane.predecessors}) {
      for (const auto & ref : *refs) {
        if (!contains(ref)) {
          throw MapError(
            MapError::Kind::DanglingReference, ref,
            "lane " + id + " references missing lane " + ref);
        }
      }
    }
  }
}

LaneMap LaneMap::from_json(const Json & doc)
{
  try {
    JsonReader root(doc, "");
    root.expect_keys({"name", "lanes"});
    std::vector<Lane> lanes;
    const auto lanes_reader = root.at("lanes");
    for (std::size_t i = 0; i < lanes_reader.array_size(); ++i) {
      const auto item = lanes_reader.at(i);
      item.expect_keys({"id", "width", "centerline", "successors", "predecessors"});
      Lane lane;
      lane.id = item.at("id").string();
      lane.width = item.at("width").number();
      const auto cl = item.at("centerline");
      std::vector<Point2> points;
      for (std::size_t k = 0; k < cl.array_size(); ++k) {
        const auto pt = cl.at(k);
        if (pt.array_size() != 2) {
          pt.fail("expected [x, y]");
        }
        points.push_back({pt.at(std::size_t{0}).number(), pt.at(std::size_t{1}).number()});
      }
      if (points.size() < 2) {
        throw MapError(MapError::Kind::Malformed, lane.id, "lane " + lane.id + " needs at least 2 centerline points");
      }
      lane.centerline = Polyline(std::move(points));
      lane.successors = item.has("successors") ? read_id_list(item.at("successors")) : std::vector<std::string>{};
      lane.predecessors =
        item.has("predecessors") ? read_id_list(item.at("predecessors")) : std::vector<std::string>{};
      lanes.push_back(std::move(lane));
    }
    return LaneMap(root.at("name").string(), std::move(lanes));
  } catch (const SchemaError & e) {
    throw MapError(MapError::Kind::Malformed, "", std::string("malformed map document: ") + e.what());
  }
}

Json LaneMap::to_json() const
{
  Json lanes = Json::array();
  for (const auto & [id, lane] : lanes_) {
    lanes.push_back({
      {"id", id},
      {"width", lane.width},
      {"centerline", points_to_json(lane.centerline.points())},
      {"successors", lane.successors},
      {"predecessors", lane.predecessors},
    });
  }
  return {{"name", name_}, {"lanes", lanes}};
}

const Lane & LaneMap::lane(const std::string & lane_id) const
{
  auto it = lanes_.find(lane_id);
  if (it == lanes_.end()) {
    throw MapError(MapError::Kind::UnknownLane, lane_id, "unknown lane id " + lane_id);
  }
  return it->second;
}

LaneMap load_map(const std::filesystem::path & path)
{
  if (!std::filesystem::exists(path)) {
    throw MapError(MapError::Kind::MissingFile, "", "map file not found: " + path.string());
  }
  Json doc;
  try {
    doc = parse_json(read_text_file(path));
  } catch (const SchemaError & e) {
    throw MapError(MapError::Kind::Malformed, "", path.string() + ": " + e.what());
  }
  return LaneMap::from_json(doc);
}

Route route(const LaneMap & map, const std::string & start_lane, const std::string & end_lane)
{
  const Lane & start = map.lane(start_lane);
  map.lane(end_lane);

  std::vector<std::string> best_sequence;
  if (start_lane == end_lane) {
    best_sequence = {start_lane};
  } else {
    std::priority_queue<Label, std::vector<Label>, std::greater<>> open;
    std::set<std::string> settled;
    open.push({cost_key(start.length()), {start_lane}});
    while (!open.empty()) {
      Label label = open.top();
      open.pop();
      const std::string & tip = label.sequence.back();
      if (!settled.insert(tip).second) {
        continue;
      }
      if (tip == end_lane) {
        best_sequence = std::move(label.sequence);
        break;
      }
      for (const auto & next : map.lane(tip).successors) {
        if (settled.count(next) != 0) {
          continue;
        }
        Label child{label.cost + cost_key(map.lane(next).length()), label.sequence};
        child.sequence.push_back(next);
        open.push(std::move(child));
      }
    }
    if (best_sequence.empty()) {
      throw MapError(
        MapError::Kind::NoRoute, end_lane, "no route from " + start_lane + " to " + end_lane);
    }
  }

  std::vector<Point2> stitched;
  for (const auto & id : best_sequence) {
    const auto & pts = map.lane(id).centerline.points();
    std::size_t first = 0;
    if (!stitched.empty() && distance(stitched.back(), pts.front()) <= kStitchTolerance) {
      first = 1;
    }
    stitched.insert(stitched.end(), pts.begin() + static_cast<std::ptrdiff_t>(first), pts.end());
  }
  Route result;
  result.lane_sequence = std::move(best_sequence);
  result.stitched_centerline = Polyline(std::move(stitched));
  result.total_length = result.stitched_centerline.length();
  return result;
}

Route clip_route(const Route & route, double start_s, double end_s)
{
  const Polyline & line = route.stitched_centerline;
  start_s = std::clamp(start_s, 0.0, line.length());
  end_s = std::clamp(end_s, 0.0, line.length());
  if (end_s - start_s <= kMinVertexSpacing) {
    throw MapError(MapError::Kind::InvalidArgument, "", "clipped route must have positive length");
  }
  std::vector<Point2> pts{line.point_at(start_s)};
  for (std::size_t i = 0; i < line.size(); ++i) {
    const double s = line.station(i);
    if (s > start_s + kMinVertexSpacing && s < end_s - kMinVertexSpacing) {
      pts.push_back(line.points()[i]);
    }
  }
  pts.push_back(line.point_at(end_s));
  Route clipped;
  clipped.lane_sequence = route.lane_sequence;
  clipped.stitched_centerline = Polyline(std::move(pts));
  clipped.total_length = clipped.stitched_centerline.length();
  return clipped;
}

double route_station(const LaneMap & map, const Route & route, const std::string & lane_id, double station)
{
  double offset = 0.0;
  for (const auto & id : route.lane_sequence) {
    const Lane & lane = map.lane(id);
    if (id == lane_id) {
      return offset + std::clamp(station, 0.0, lane.length());
    }
    offset += lane.length();
  }
  throw MapError(MapError::Kind::UnknownLane, lane_id, "lane " + lane_id + " is not on the route");
}

LaneProjection project(const LaneMap & map, Point2 point)
{
  constexpr double kTieTolerance = 1e-12;
  LaneProjection best;
  best.distance = std::numeric_limits<double>::infinity();
  for (const auto & [id, lane] : map.lanes()) {
    const auto proj = lane.centerline.project(point);
    if (proj.distance < best.distance - kTieTolerance) {
      best.lane_id = id;
      best.s = proj.s;
      best.lateral_offset = proj.lateral_offset;
      best.distance = proj.distance;
    }
  }
  return best;
}

std::vector<Pose> sample_route(const Route & route, double spacing)
{
  if (!(spacing > 0.0)) {
    throw MapError(MapError::Kind::InvalidArgument, "", "sample spacing must be positive");
  }
  const Polyline & line = route.stitched_centerline;
  const double total = line.length();
  std::vector<Pose> poses;
  for (std::size_t k = 0;; ++k) {
    const double s = static_cast<double>(k) * spacing;
    if (s >= total - 1e-9) {
      break;
    }
    poses.push_back(line.pose_at(s));
  }
  poses.push_back(line.pose_at(total));
  return poses;
}

}  // namespace scenofuzz::maps
