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

#ifndef SCENOFUZZ__BRIDGE__TRANSPORT_HPP_
#define SCENOFUZZ__BRIDGE__TRANSPORT_HPP_

#include "scenofuzz/bridge/messages.hpp"

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>

namespace scenofuzz::bridge
{

inline constexpr std::chrono::milliseconds kDefaultResponseTimeout{5000};
inline constexpr const char * kBridgeAddrEnv = "SCENOFUZZ_BRIDGE_ADDR";

class BridgeError : public std::runtime_error
{
public:
  enum class Kind { ConnectRefused, Timeout, Closed, Protocol, BadEndpoint };

  BridgeError(Kind kind, const std::string & what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

private:
  Kind kind_;
};

/// Agent-side logic: one control reply per perception message.
using AgentHandler = std::function<ControlMessage(const PerceptionMessage &)>;
/// Called once per session so that every session gets fresh agent state.
using AgentHandlerFactory = std::function<AgentHandler()>;

/// Runner-side end of a lockstep session. Each exchange sends one
/// perception frame and blocks for the matching control frame.
class AgentSession
{
public:
  virtual ~AgentSession() = default;

  /// Throws BridgeError on timeout, closed channel, a reply of the wrong
  /// type or a reply whose sim_time does not echo the request. After a
  /// failure the session refuses further exchanges.
  ControlMessage exchange(const PerceptionMessage & msg, std::chrono::milliseconds timeout = kDefaultResponseTimeout);

  std::size_t sent() const { return sent_; }
  std::size_t received() const { return received_; }

protected:
  virtual void send_frame(const Bytes & frame) = 0;
  /// Returns one complete frame (header included) or throws BridgeError.
  virtual Bytes receive_frame(std::chrono::milliseconds timeout) = 0;

private:
  std::size_t sent_{0};
  std::size_t received_{0};
};

/// Keeps an endpoint served for as long as it is alive.
class ServerHandle
{
public:
  virtual ~ServerHandle() = default;
  /// Endpoint clients should connect to (resolves tcp port 0).
  virtual std::string endpoint() const = 0;
};

/// Serves `factory` at `endpoint`: "inproc://<name>" or "tcp://<host>:<port>"
/// (port 0 picks a free port). TCP connections each run in their own thread.
std::unique_ptr<ServerHandle> serve(const std::string & endpoint, AgentHandlerFactory factory);

/// Opens a session to a served endpoint.
std::unique_ptr<AgentSession> connect(const std::string & endpoint);

/// Session whose agent runs on a private thread of this process, reached
/// through an in-memory frame channel.
std::unique_ptr<AgentSession> connect_in_process(AgentHandler handler);

/// Runs the agent side of a session over an already-connected socket until
/// the peer closes it or `stop` becomes true.
void serve_socket(int fd, const AgentHandler & handler, const std::atomic<bool> & stop);

}  // namespace scenofuzz::bridge

#endif  // SCENOFUZZ__BRIDGE__TRANSPORT_HPP_
