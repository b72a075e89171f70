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

#include "support.hpp"

#include "scenofuzz/sim/collision.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace scenofuzz::scenario
{
namespace
{

using testing::fixture_map;

// Golden canonical hash of the three-NPC junction scenario.
constexpr const char * kJunctionScenarioSha256 = "4c01d8716741d12bef7c20ebbf16914064aded1ac915971f69049e8c2e13455a";

NpcSpec npc_on_straight(const std::string & id, double x, std::size_t waypoints)
{
  NpcSpec npc;
  npc.actor_id = id;
  for (std::size_t k = 0; k < waypoints; ++k) {
    npc.waypoints.push_back({x + 20.0 * k, 0.0, 0.0});
  }
  npc.target_speeds.assign(waypoints - 1, 6.0);
  return npc;
}

bool has_code(const std::vector<Violation> & list, ViolationCode code)
{
  return std::any_of(list.begin(), list.end(), [code](const Violation & v) { return v.code == code; });
}

TEST(Validate, WellFormedFixtures)
{
  const auto map = fixture_map("borregas_ave_lite");
  EXPECT_TRUE(validate(testing::junction_scenario(map), map).empty());
  EXPECT_TRUE(validate(testing::straight_scenario(), fixture_map("straight_road")).empty());
}

TEST(Validate, ShippedJunctionFixtureMatchesTheTemplate)
{
  const auto map = fixture_map("borregas_ave_lite");
  const auto shipped = load_scenario(testing::source_dir() / "data" / "scenarios" / "junction.json");
  EXPECT_EQ(shipped, testing::junction_scenario(map));
  EXPECT_TRUE(validate(shipped, map).empty());
}

TEST(Validate, DuplicateActorId)
{
  const auto map = fixture_map("straight_road");
  auto config = testing::straight_scenario();
  config.npc_vehicles.push_back(npc_on_straight("npc_1", 80.0, 2));
  config.npc_vehicles.push_back(npc_on_straight("npc_1", 140.0, 2));
  const auto v = validate(config, map);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].code, ViolationCode::DuplicateActorId);
  EXPECT_EQ(v[0].subjects, std::vector<std::string>{"npc_1"});
}

TEST(Validate, InitialOverlapAgreesWithDistanceOracle)
{
  const auto map = fixture_map("straight_road");
  auto config = testing::straight_scenario();
  config.npc_vehicles.push_back(npc_on_straight("npc", 12.0, 2));
  const auto v = validate(config, map);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].code, ViolationCode::InitialOverlap);
  EXPECT_EQ(v[0].subjects, (std::vector<std::string>{"ego", "npc"}));
  const sim::OrientedBox ego{ego_start_pose(config, map), config.ego.body};
  const sim::OrientedBox npc{config.npc_vehicles[0].waypoints[0], config.npc_vehicles[0].body};
  EXPECT_EQ(sim::obb_distance(ego, npc), 0.0);

  // Moved clear of the ego the overlap disappears, in agreement with the oracle.
  config.npc_vehicles[0] = npc_on_straight("npc", 20.0, 2);
  const sim::OrientedBox clear{config.npc_vehicles[0].waypoints[0], config.npc_vehicles[0].body};
  EXPECT_GT(sim::obb_distance(ego, clear), 0.0);
  EXPECT_TRUE(validate(config, map).empty());
}

TEST(Validate, ReportsEachInvariant)
{
  const auto map = fixture_map("straight_road");
  auto config = testing::straight_scenario();
  config.duration_limit = 0.0;
  config.ego.end_station = 500.0;
  auto bad = npc_on_straight("npc", 100.0, 3);
  bad.target_speeds = {5.0, 31.0};
  bad.spawn_delay = -1.0;
  config.npc_vehicles.push_back(bad);
  auto single = npc_on_straight("lonely", 150.0, 2);
  single.waypoints.pop_back();
  config.npc_vehicles.push_back(single);
  config.static_obstacles.push_back({"rock", {180.0, 0.0, 0.0}, {1.0, 2.0}});
  const auto v = validate(config, map);
  EXPECT_TRUE(has_code(v, ViolationCode::NonPositiveDuration));
  EXPECT_TRUE(has_code(v, ViolationCode::StationOutOfRange));
  EXPECT_TRUE(has_code(v, ViolationCode::SpeedOutOfRange));
  EXPECT_TRUE(has_code(v, ViolationCode::NegativeSpawnDelay));
  EXPECT_TRUE(has_code(v, ViolationCode::TooFewWaypoints));
  EXPECT_TRUE(has_code(v, ViolationCode::InvalidBody));
  EXPECT_EQ(validate(config, map), v);

  auto unknown = testing::straight_scenario();
  unknown.ego.end_lane = "nowhere";
  EXPECT_TRUE(has_code(validate(unknown, map), ViolationCode::UnknownLane));
}

TEST(Json, MinimalRoundTrip)
{
  const auto config = testing::straight_scenario();
  EXPECT_EQ(from_json(to_json(config)), config);
  EXPECT_EQ(to_json(config).at("schema_version"), 1);
}

TEST(Json, MissingEgoReportsPointer)
{
  Json doc = to_json(testing::straight_scenario());
  doc.erase("ego");
  try {
    from_json(doc);
    FAIL();
  } catch (const SchemaError & e) {
    EXPECT_EQ(e.path(), "/ego");
  }
  doc = to_json(testing::junction_scenario(fixture_map("borregas_ave_lite")));
  doc["npc_vehicles"][1]["target_speeds"][0] = "fast";
  try {
    from_json(doc);
    FAIL();
  } catch (const SchemaError & e) {
    EXPECT_EQ(e.path(), "/npc_vehicles/1/target_speeds/0");
  }
}

TEST(Json, JunctionScenarioCanonicalHashIsStable)
{
  const auto config = testing::junction_scenario(fixture_map("borregas_ave_lite"));
  ASSERT_EQ(config.npc_vehicles.size(), 3u);
  const std::string first = to_canonical_string(config);
  const std::string second = to_canonical_string(from_json(parse_json(first)));
  EXPECT_EQ(first, second);
  EXPECT_EQ(sha256_hex(first), sha256_hex(second));
  EXPECT_EQ(sha256_hex(first), kJunctionScenarioSha256);
}

TEST(Json, FileRoundTrip)
{
  testing::TempDir dir("scenario");
  const auto config = testing::junction_scenario(fixture_map("borregas_ave_lite"));
  save_scenario(config, dir.path() / "s.json");
  EXPECT_EQ(load_scenario(dir.path() / "s.json"), config);
}

TEST(Flatten, CountsOnlyMutableFields)
{
  const auto map = fixture_map("straight_road");
  auto config = testing::straight_scenario();
  config.npc_vehicles.push_back(npc_on_straight("npc", 100.0, 3));
  MutationSpace speeds;
  speeds.segment_speeds = true;
  const auto vec = flatten(config, speeds, map);
  EXPECT_EQ(vec.size(), 2u);
  EXPECT_EQ(vec.bounds.size(), 2u);
  EXPECT_EQ(vec.bounds[0], (GeneBounds{0.0, 20.0}));
  EXPECT_EQ(flatten(config, MutationSpace{}, map).size(), 0u);
  // 3 offsets + 2 speeds + 1 delay.
  EXPECT_EQ(flatten(config, MutationSpace::full(), map).size(), 6u);

  auto elsewhere = config;
  elsewhere.ego.start_lane = "lane_99";
  EXPECT_THROW(flatten(elsewhere, speeds, map), ScenarioError);
}

TEST(Flatten, JunctionRoundTripsThroughUnflatten)
{
  const auto map = fixture_map("borregas_ave_lite");
  const auto config = testing::junction_scenario(map);
  const auto vec = flatten(config, MutationSpace::full(), map);
  EXPECT_EQ(vec.size(), 3u * (4 + 3 + 1));
  for (std::size_t i = 0; i < vec.size(); ++i) {
    EXPECT_GE(vec.values[i], vec.bounds[i].low);
    EXPECT_LE(vec.values[i], vec.bounds[i].high);
  }
  const auto back = unflatten(vec, config, map);
  EXPECT_FALSE(back.repaired);
  EXPECT_EQ(back.config, config);
  EXPECT_EQ(to_canonical_string(back.config), to_canonical_string(config));
}

TEST(Unflatten, ClampsAndFlagsOutOfBounds)
{
  const auto map = fixture_map("straight_road");
  auto config = testing::straight_scenario();
  config.npc_vehicles.push_back(npc_on_straight("npc", 100.0, 3));
  MutationSpace speeds;
  speeds.segment_speeds = true;
  auto vec = flatten(config, speeds, map);
  vec.values[1] = 1e9;
  const auto out = unflatten(vec, config, map);
  EXPECT_TRUE(out.repaired);
  EXPECT_EQ(out.clamped, std::vector<std::size_t>{1});
  EXPECT_EQ(out.config.npc_vehicles[0].target_speeds[1], 20.0);
  EXPECT_EQ(out.config.npc_vehicles[0].target_speeds[0], 6.0);
}

TEST(Unflatten, LateralOffsetShiftsAlongTheNormal)
{
  const auto map = fixture_map("borregas_ave_lite");
  const auto config = testing::junction_scenario(map);
  MutationSpace offsets;
  offsets.waypoint_offsets = true;
  auto vec = flatten(config, offsets, map);
  // Gene 2 is waypoint 2 of the first NPC.
  ASSERT_EQ(vec.layout[2], (GeneRef{GeneField::WaypointOffset, 0, 2}));
  vec.values[2] += 0.5;
  const auto out = unflatten(vec, config, map);
  const auto & before = config.npc_vehicles[0].waypoints;
  const auto & after = out.config.npc_vehicles[0].waypoints;
  for (std::size_t k = 0; k < before.size(); ++k) {
    if (k == 2) {
      const double nx = -std::sin(before[k].heading);
      const double ny = std::cos(before[k].heading);
      EXPECT_NEAR(after[k].x - before[k].x, 0.5 * nx, 1e-9);
      EXPECT_NEAR(after[k].y - before[k].y, 0.5 * ny, 1e-9);
      EXPECT_EQ(after[k].heading, before[k].heading);
    } else {
      EXPECT_EQ(after[k], before[k]);
    }
  }
}

TEST(Unflatten, LayoutMismatchThrows)
{
  const auto map = fixture_map("borregas_ave_lite");
  const auto config = testing::junction_scenario(map);
  auto vec = flatten(config, MutationSpace::full(), map);
  vec.bounds.pop_back();
  EXPECT_THROW(unflatten(vec, config, map), ScenarioError);
  auto fewer = config;
  fewer.npc_vehicles.pop_back();
  EXPECT_THROW(unflatten(flatten(config, MutationSpace::full(), map), fewer, map), ScenarioError);
}

TEST(Properties, FlattenUnflattenInverseForEverySpace)
{
  const auto map = fixture_map("borregas_ave_lite");
  const auto config = testing::junction_scenario(map);
  Rng rng(3);
  for (int mask = 0; mask < 8; ++mask) {
    MutationSpace space;
    space.waypoint_offsets = mask & 1;
    space.segment_speeds = mask & 2;
    space.spawn_delays = mask & 4;
    auto vec = flatten(config, space, map);
    for (int trial = 0; trial < 20; ++trial) {
      for (std::size_t i = 0; i < vec.size(); ++i) {
        vec.values[i] = rng.uniform(vec.bounds[i].low, vec.bounds[i].high);
      }
      const auto mutated = unflatten(vec, config, map);
      EXPECT_FALSE(mutated.repaired);
      const auto again = flatten(mutated.config, space, map);
      ASSERT_EQ(again.size(), vec.size());
      for (std::size_t i = 0; i < vec.size(); ++i) {
        EXPECT_NEAR(again.values[i], vec.values[i], 1e-9);
      }
      EXPECT_EQ(from_json(to_json(mutated.config)), mutated.config);
    }
  }
}

}  // namespace
}  // namespace scenofuzz::scenario
