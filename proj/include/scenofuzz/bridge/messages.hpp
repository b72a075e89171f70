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

#ifndef SCENOFUZZ__BRIDGE__MESSAGES_HPP_
#define SCENOFUZZ__BRIDGE__MESSAGES_HPP_

#include "scenofuzz/sim/types.hpp"

#include <cstdint>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

namespace scenofuzz::bridge
{

/// Observation handed to the system under test: the ego state plus every
/// other actor, in the world frame.
struct PerceptionMessage
{
  double sim_time{0.0};
  sim::ActorState ego_state;
  std::vector<sim::ActorState> obstacles;

  friend bool operator==(const PerceptionMessage &, const PerceptionMessage &) = default;
};

/// Reply to the PerceptionMessage stamped with the same sim_time.
struct ControlMessage
{
  double sim_time{0.0};
  sim::ControlCommand command;

  friend bool operator==(const ControlMessage &, const ControlMessage &) = default;
};

using Message = std::variant<PerceptionMessage, ControlMessage>;

/// Builds the perception message for the ego actor of `world`.
PerceptionMessage observe(const sim::WorldState & world);

class FrameError : public std::runtime_error
{
public:
  enum class Kind { Truncated, TooLarge, UnknownType, Schema };

  FrameError(Kind kind, const std::string & what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

private:
  Kind kind_;
};

inline constexpr std::size_t kFrameHeaderSize = 4;
inline constexpr std::uint32_t kMaxFrameBody = 64u << 20;

using Bytes = std::vector<std::uint8_t>;

/// [u32 big-endian body length][UTF-8 canonical JSON body]
Bytes encode(const Message & message);

struct Decoded
{
  Message message;
  std::size_t consumed;  ///< header + body bytes
};

/// Decodes the first frame in `bytes`. Never reads past the declared
/// length; malformed input raises FrameError.
Decoded decode(std::span<const std::uint8_t> bytes);

/// Declared body length of a frame header; throws FrameError::Truncated when
/// fewer than 4 bytes are available.
std::uint32_t peek_body_length(std::span<const std::uint8_t> bytes);

Message decode_body(std::span<const std::uint8_t> body);

}  // namespace scenofuzz::bridge

#endif  // SCENOFUZZ__BRIDGE__MESSAGES_HPP_
