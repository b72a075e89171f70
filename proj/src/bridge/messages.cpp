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

#include "scenofuzz/bridge/messages.hpp"

namespace scenofuzz::bridge
{
namespace
{

Json message_to_json(const PerceptionMessage & msg)
{
  Json obstacles = Json::array();
  for (const auto & actor : msg.obstacles) {
    obstacles.push_back(sim::actor_to_json(actor));
  }
  return {
    {"type", "perception"},
    {"sim_time", msg.sim_time},
    {"ego", sim::actor_to_json(msg.ego_state)},
    {"obstacles", obstacles},
  };
}

Json message_to_json(const ControlMessage & msg)
{
  return {
    {"type", "control"},
    {"sim_time", msg.sim_time},
    {"throttle", msg.command.throttle},
    {"brake", msg.command.brake},
    {"steering", msg.command.steering},
  };
}

}  // namespace

PerceptionMessage observe(const sim::WorldState & world)
{
  PerceptionMessage msg;
  msg.sim_time = world.sim_time;
  bool have_ego = false;
  for (const auto & actor : world.actors) {
    if (actor.kind == sim::ActorKind::Ego && !have_ego) {
      msg.ego_state = actor;
      have_ego = true;
    } else {
      msg.obstacles.push_back(actor);
    }
  }
  if (!have_ego) {
    throw sim::SimError("cannot observe a world without an ego actor");
  }
  return msg;
}

Bytes encode(const Message & message)
{
  const std::string body = std::visit([](const auto & m) { return canonical_dump(message_to_json(m)); }, message);
  if (body.size() > kMaxFrameBody) {
    throw FrameError(FrameError::Kind::TooLarge, "message body exceeds frame limit");
  }
  const auto n = static_cast<std::uint32_t>(body.size());
  Bytes frame;
  frame.reserve(kFrameHeaderSize + body.size());
  frame.push_back(static_cast<std::uint8_t>(n >> 24));
  frame.push_back(static_cast<std::uint8_t>(n >> 16));
  frame.push_back(static_cast<std::uint8_t>(n >> 8));
  frame.push_back(static_cast<std::uint8_t>(n));
  frame.insert(frame.end(), body.begin(), body.end());
  return frame;
}

std::uint32_t peek_body_length(std::span<const std::uint8_t> bytes)
{
  if (bytes.size() < kFrameHeaderSize) {
    throw FrameError(FrameError::Kind::Truncated, "frame header truncated");
  }
  return (std::uint32_t{bytes[0]} << 24) | (std::uint32_t{bytes[1]} << 16) | (std::uint32_t{bytes[2]} << 8) |
         std::uint32_t{bytes[3]};
}

Message decode_body(std::span<const std::uint8_t> body)
{
  Json doc;
  try {
    doc = Json::parse(body.begin(), body.end());
  } catch (const Json::exception & e) {
    throw FrameError(FrameError::Kind::Schema, std::string("body is not valid JSON: ") + e.what());
  }
  try {
    JsonReader root(doc, "");
    const std::string type = root.at("type").string();
    if (type == "perception") {
      root.expect_keys({"type", "sim_time", "ego", "obstacles"});
      PerceptionMessage msg;
      msg.sim_time = root.at("sim_time").number();
      msg.ego_state = sim::actor_from_json(root.at("ego"));
      const auto obstacles = root.at("obstacles");
      for (std::size_t i = 0; i < obstacles.array_size(); ++i) {
        msg.obstacles.push_back(sim::actor_from_json(obstacles.at(i)));
      }
      return msg;
    }
    if (type == "control") {
      root.expect_keys({"type", "sim_time", "throttle", "brake", "steering"});
      ControlMessage msg;
      msg.sim_time = root.at("sim_time").number();
      msg.command = {root.at("throttle").number(), root.at("brake").number(), root.at("steering").number()};
      return msg;
    }
    throw FrameError(FrameError::Kind::UnknownType, "unknown message type: " + type);
  } catch (const SchemaError & e) {
    throw FrameError(FrameError::Kind::Schema, std::string("schema violation: ") + e.what());
  }
}

Decoded decode(std::span<const std::uint8_t> bytes)
{
  const std::uint32_t n = peek_body_length(bytes);
  if (n > kMaxFrameBody) {
    throw FrameError(FrameError::Kind::TooLarge, "declared frame length exceeds limit");
  }
  if (bytes.size() - kFrameHeaderSize < n) {
    throw FrameError(
      FrameError::Kind::Truncated, "frame declares " + std::to_string(n) + " body bytes but only " +
                                     std::to_string(bytes.size() - kFrameHeaderSize) + " are present");
  }
  return {decode_body(bytes.subspan(kFrameHeaderSize, n)), kFrameHeaderSize + n};
}

}  // namespace scenofuzz::bridge
