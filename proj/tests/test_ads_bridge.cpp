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

#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <thread>

namespace scenofuzz::bridge
{
namespace
{

using sim::ActorKind;
using sim::ActorState;

ActorState actor(const std::string & id, ActorKind kind, double x, double y, double heading, double speed)
{
  ActorState s;
  s.actor_id = id;
  s.kind = kind;
  s.pose = {x, y, heading};
  s.speed = speed;
  return s;
}

Bytes bytes_of(const std::string & text) { return Bytes(text.begin(), text.end()); }

Bytes frame_of(const std::string & body)
{
  const auto n = static_cast<std::uint32_t>(body.size());
  Bytes out{static_cast<std::uint8_t>(n >> 24), static_cast<std::uint8_t>(n >> 16), static_cast<std::uint8_t>(n >> 8),
            static_cast<std::uint8_t>(n)};
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

EgoAgentConfig straight_agent(double cruise = 8.0)
{
  const auto map = testing::fixture_map("straight_road");
  EgoAgentConfig config;
  config.route = maps::route(map, "lane_1", "lane_1");
  config.cruise_speed = cruise;
  return config;
}

PerceptionMessage cruising(double x, double speed)
{
  PerceptionMessage msg;
  msg.sim_time = 3.0;
  msg.ego_state = actor("ego", ActorKind::Ego, x, 0.0, 0.0, speed);
  msg.ego_state.body = {4.7, 2.0};
  return msg;
}

FrameError::Kind decode_error(const Bytes & frame)
{
  try {
    decode(frame);
  } catch (const FrameError & e) {
    return e.kind();
  }
  ADD_FAILURE() << "decode accepted the frame";
  return FrameError::Kind::Schema;
}

TEST(Codec, EmptyPerceptionRoundTrip)
{
  PerceptionMessage msg = cruising(10.0, 2.5);
  const Bytes frame = encode(msg);
  const auto decoded = decode(frame);
  EXPECT_EQ(decoded.consumed, frame.size());
  EXPECT_EQ(std::get<PerceptionMessage>(decoded.message), msg);
  const std::string body(frame.begin() + 4, frame.end());
  EXPECT_EQ(parse_json(body).at("type"), "perception");
  EXPECT_EQ(parse_json(body).at("obstacles").size(), 0u);
}

TEST(Codec, ControlRoundTripAndWireLayout)
{
  const ControlMessage msg{1.5, {0.25, 0.0, -0.125}};
  const Bytes frame = encode(msg);
  EXPECT_EQ(std::get<ControlMessage>(decode(frame).message), msg);
  const std::string body(frame.begin() + 4, frame.end());
  EXPECT_EQ(body, R"({"brake":0,"sim_time":1.5,"steering":-0.125,"throttle":0.25,"type":"control"})");
  EXPECT_EQ(frame[0], 0);
  EXPECT_EQ(frame[3], body.size());
}

TEST(Codec, FiftyObstaclesLengthPrefix)
{
  PerceptionMessage msg = cruising(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    msg.obstacles.push_back(actor("npc_" + std::to_string(i), ActorKind::Npc, i * 7.5, -i * 0.25, 0.01 * i, 0.1 * i));
  }
  const Bytes frame = encode(msg);
  const std::string body = canonical_dump(parse_json(std::string(frame.begin() + 4, frame.end())));
  EXPECT_EQ(frame.size(), 4 + body.size());
  EXPECT_EQ(peek_body_length(frame), body.size());
  EXPECT_EQ(std::get<PerceptionMessage>(decode(frame).message), msg);
}

TEST(Codec, Errors)
{
  Bytes truncated = frame_of("abcdef");
  truncated[3] = 10;
  EXPECT_EQ(decode_error(truncated), FrameError::Kind::Truncated);
  EXPECT_EQ(decode_error(Bytes{0, 0}), FrameError::Kind::Truncated);
  EXPECT_EQ(decode_error(frame_of(R"({"type":"hello","sim_time":0})")), FrameError::Kind::UnknownType);
  EXPECT_EQ(decode_error(frame_of(R"({"type":"control","sim_time":0,"throttle":0,"brake":0})")), FrameError::Kind::Schema);
  EXPECT_EQ(decode_error(frame_of(R"({"type":"control","sim_time":0,"throttle":0,"brake":0,"steering":0,"x":1})")), FrameError::Kind::Schema);
  EXPECT_EQ(decode_error(frame_of("not json")), FrameError::Kind::Schema);
  EXPECT_EQ(decode_error(Bytes{0xff, 0xff, 0xff, 0xff}), FrameError::Kind::TooLarge);
}

TEST(Codec, NeverReadsPastDeclaredLength)
{
  const Bytes first = encode(ControlMessage{0.1, {1.0, 0.0, 0.0}});
  Bytes joined = first;
  const Bytes garbage = bytes_of("}}}garbage");
  joined.insert(joined.end(), garbage.begin(), garbage.end());
  const auto decoded = decode(joined);
  EXPECT_EQ(decoded.consumed, first.size());
}

TEST(Codec, RandomBytesNeverCrash)
{
  Rng rng(99);
  std::size_t accepted = 0;
  for (int i = 0; i < 10000; ++i) {
    Bytes junk(rng.index(64));
    for (auto & b : junk) b = static_cast<std::uint8_t>(rng.index(256));
    if (rng.bernoulli(0.5) && junk.size() >= 4) {
      const auto n = static_cast<std::uint32_t>(junk.size() - 4);
      junk[0] = 0;
      junk[1] = 0;
      junk[2] = static_cast<std::uint8_t>(n >> 8);
      junk[3] = static_cast<std::uint8_t>(n);
    }
    try {
      const auto d = decode(junk);
      EXPECT_LE(d.consumed, junk.size());
      ++accepted;
    } catch (const FrameError &) {
    }
  }
  EXPECT_EQ(accepted, 0u);
}

TEST(EgoAgent, EmptyRoadEquilibrium)
{
  const auto config = straight_agent();
  const auto decision = ego_agent_decide(config, cruising(50.0, 8.0));
  EXPECT_LT(std::abs(decision.control.command.steering), 1e-3);
  EXPECT_NEAR(decision.control.command.throttle, config.params.drag * 8.0 / config.params.a_max, 1e-9);
  EXPECT_EQ(decision.control.command.brake, 0.0);
  EXPECT_EQ(decision.control.sim_time, 3.0);
  EXPECT_FALSE(decision.off_route);
  EXPECT_EQ(decision.corridor_gap, -1.0);
}

TEST(EgoAgent, StoppedObstacleAheadForcesFullBrake)
{
  const auto config = straight_agent();
  auto msg = cruising(50.0, 8.0);
  // Rear bumper 4 m ahead of the ego's front bumper.
  msg.obstacles.push_back(actor("parked", ActorKind::Static, 50.0 + 2.35 + 4.0 + 2.35, 0.0, 0.0, 0.0));
  msg.obstacles.back().body = {4.7, 2.0};
  const auto decision = ego_agent_decide(config, msg);
  EXPECT_NEAR(decision.corridor_gap, 4.0, 1e-9);
  EXPECT_EQ(decision.control.command.brake, 1.0);
  EXPECT_EQ(decision.control.command.throttle, 0.0);
}

TEST(EgoAgent, HeadwayBrakingIsProportional)
{
  const auto config = straight_agent();
  auto msg = cruising(50.0, 8.0);
  msg.obstacles.push_back(actor("slow", ActorKind::Npc, 50.0 + 2.35 + 11.0 + 2.35, 0.0, 0.0, 0.0));
  msg.obstacles.back().body = {4.7, 2.0};
  const auto near = ego_agent_decide(config, msg).control.command;
  msg.obstacles.back().pose.x += 3.0;
  const auto far = ego_agent_decide(config, msg).control.command;
  EXPECT_GT(near.brake, far.brake);
  EXPECT_GT(far.brake, 0.0);
  EXPECT_LT(near.brake, 1.0);
  // Beyond the 2 s headway no braking happens.
  msg.obstacles.back().pose.x = 50.0 + 2.35 + 18.0 + 2.35;
  EXPECT_EQ(ego_agent_decide(config, msg).control.command.brake, 0.0);
}

TEST(EgoAgent, IgnoreObstaclesFaultMatchesEmptyRoad)
{
  auto config = straight_agent();
  config.fault_ignore_obstacles = true;
  auto msg = cruising(50.0, 8.0);
  const auto empty = ego_agent_step(config, msg);
  msg.obstacles.push_back(actor("parked", ActorKind::Static, 58.7, 0.0, 0.0, 0.0));
  EXPECT_EQ(ego_agent_step(config, msg), empty);
}

TEST(EgoAgent, JunctionFaultIgnoresOnlyCrossingTraffic)
{
  auto config = straight_agent();
  config.fault_ignore_junction_traffic = true;
  auto msg = cruising(50.0, 8.0);
  const auto empty = ego_agent_step(config, msg);
  msg.obstacles.push_back(actor("crossing", ActorKind::Npc, 58.7, 0.0, std::numbers::pi / 2, 5.0));
  EXPECT_EQ(ego_agent_step(config, msg), empty);
  msg.obstacles[0].pose.heading = 0.2;
  EXPECT_EQ(ego_agent_step(config, msg).command.brake, 1.0);
  msg.obstacles[0].pose.heading = std::numbers::pi / 2;
  msg.obstacles[0].kind = ActorKind::Static;
  EXPECT_EQ(ego_agent_step(config, msg).command.brake, 1.0);
}

TEST(EgoAgent, OffRouteAndInvalidCruise)
{
  const auto config = straight_agent();
  auto msg = cruising(50.0, 8.0);
  msg.ego_state.pose.y = 25.0;
  const auto decision = ego_agent_decide(config, msg);
  EXPECT_TRUE(decision.off_route);
  EXPECT_EQ(decision.control.command, (sim::ControlCommand{0.0, 1.0, 0.0}));
  EXPECT_THROW(ego_agent_decide(straight_agent(0.0), cruising(0, 0)), std::invalid_argument);
  EXPECT_THROW(ego_agent_decide(straight_agent(31.0), cruising(0, 0)), std::invalid_argument);
}

TEST(EgoAgent, StopsNearTheRouteEnd)
{
  const auto config = straight_agent();
  const auto cmd = ego_agent_step(config, cruising(195.0, 8.0)).command;
  EXPECT_GT(cmd.brake, 0.0);
}

TEST(Transport, InProcessSessionIsLockstep)
{
  std::size_t calls = 0;
  auto session = connect_in_process([&calls](const PerceptionMessage & m) {
    ++calls;
    return ControlMessage{m.sim_time, {}};
  });
  for (int i = 0; i < 10; ++i) {
    EXPECT_EQ(session->sent(), session->received());
    const auto reply = session->exchange(cruising(0.0, 0.0));
    EXPECT_EQ(reply.sim_time, 3.0);
    EXPECT_EQ(session->sent(), session->received());
  }
  EXPECT_EQ(calls, 10u);
  EXPECT_EQ(session->sent(), 10u);
}

TEST(Transport, WrongEchoIsAProtocolError)
{
  auto session = connect_in_process([](const PerceptionMessage & m) { return ControlMessage{m.sim_time + 1.0, {}}; });
  try {
    session->exchange(cruising(0.0, 0.0));
    FAIL();
  } catch (const BridgeError & e) {
    EXPECT_EQ(e.kind(), BridgeError::Kind::Protocol);
  }
  EXPECT_EQ(session->sent() - session->received(), 1u);
  EXPECT_THROW(session->exchange(cruising(0.0, 0.0)), BridgeError);
}

TEST(Transport, TcpAndInprocServeConcurrentSessions)
{
  for (const std::string endpoint : {"tcp://127.0.0.1:0", "inproc://bridge-test"}) {
    auto server = serve(endpoint, []() {
      return [](const PerceptionMessage & m) { return ControlMessage{m.sim_time, {m.ego_state.pose.x, 0.0, 0.0}}; };
    });
    std::vector<std::thread> clients;
    std::atomic<int> ok{0};
    for (int c = 0; c < 4; ++c) {
      clients.emplace_back([&, c]() {
        auto session = connect(server->endpoint());
        for (int i = 0; i < 25; ++i) {
          auto msg = cruising(0.01 * c, 0.0);
          msg.sim_time = 0.1 * i;
          const auto reply = session->exchange(msg);
          if (reply.command.throttle == 0.01 * c && session->sent() == session->received()) ++ok;
        }
      });
    }
    for (auto & t : clients) t.join();
    EXPECT_EQ(ok.load(), 100) << endpoint;
  }
}

TEST(Transport, ConnectErrors)
{
  auto expect_kind = [](const std::string & endpoint, BridgeError::Kind kind) {
    try {
      connect(endpoint);
      ADD_FAILURE() << endpoint;
    } catch (const BridgeError & e) {
      EXPECT_EQ(e.kind(), kind) << endpoint << ": " << e.what();
    }
  };
  expect_kind("inproc://nobody-home", BridgeError::Kind::ConnectRefused);
  expect_kind("tcp://127.0.0.1:1", BridgeError::Kind::ConnectRefused);
  expect_kind("udp://x", BridgeError::Kind::BadEndpoint);
  expect_kind("tcp://127.0.0.1", BridgeError::Kind::BadEndpoint);
}

TEST(Transport, EchoAgentCompletesATenStepSession)
{
  const auto map = testing::fixture_map("straight_road");
  auto config = testing::straight_scenario();
  config.duration_limit = 1.0;
  std::vector<double> seen;
  const runner::SessionFactory echo = [&seen](const scenario::ScenarioConfig &, const maps::LaneMap &) {
    return connect_in_process([&seen](const PerceptionMessage & m) {
      seen.push_back(m.sim_time);
      return ControlMessage{m.sim_time, {}};
    });
  };
  const auto rec = runner::run_scenario(config, map, echo, {}, 1);
  EXPECT_EQ(rec.verdict.outcome, runner::Outcome::Timeout);
  EXPECT_EQ(seen.size(), 10u);
  ASSERT_EQ(rec.frames.size(), 11u);
  for (std::size_t i = 0; i < seen.size(); ++i) {
    EXPECT_EQ(seen[i], rec.frames[i].sim_time);
    EXPECT_TRUE(rec.frames[i].ego_command.has_value());
  }
  EXPECT_FALSE(rec.frames.back().ego_command.has_value());
}

TEST(Transport, SilentAgentTimesOutAfterFiveSeconds)
{
  const auto map = testing::fixture_map("straight_road");
  const auto config = testing::straight_scenario();
  const runner::SessionFactory silent = [](const scenario::ScenarioConfig &, const maps::LaneMap &) {
    return connect_in_process([](const PerceptionMessage & m) {
      std::this_thread::sleep_for(std::chrono::milliseconds(5600));
      return ControlMessage{m.sim_time, {}};
    });
  };
  const auto start = std::chrono::steady_clock::now();
  const auto rec = runner::run_scenario(config, map, silent, {}, 1);
  const double waited = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_EQ(rec.verdict.outcome, runner::Outcome::AgentTimeout);
  EXPECT_GE(waited, 5.0);
  EXPECT_LT(waited, 5.5);
  ASSERT_EQ(rec.frames.size(), 1u);
  EXPECT_FALSE(rec.frames[0].ego_command.has_value());
}

TEST(Transport, TcpRecordingMatchesInProcess)
{
  const auto map = testing::fixture_map("borregas_ave_lite");
  const auto config = testing::junction_scenario(map);
  auto a = runner::run_scenario(config, map, testing::reference_agent(config, map), {}, 7);
  auto b = runner::run_scenario(
    config, map, testing::reference_agent(config, map, false, false, config::Transport::Tcp), {}, 7);
  a.wall_clock = b.wall_clock = 0.0;
  EXPECT_GT(a.frames.size(), 10u);
  EXPECT_EQ(canonical_dump(runner::recording_to_json(a)), canonical_dump(runner::recording_to_json(b)));
}

}  // namespace
}  // namespace scenofuzz::bridge
