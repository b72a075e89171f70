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

#include "scenofuzz/bridge/transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <list>
#include <map>
#include <mutex>
#include <optional>
#include <thread>

namespace scenofuzz::bridge
{

ControlMessage AgentSession::exchange(const PerceptionMessage & msg, std::chrono::milliseconds timeout)
{
  if (sent_ != received_) {
    throw BridgeError(BridgeError::Kind::Protocol, "session is out of lockstep after an earlier failure");
  }
  send_frame(encode(msg));
  ++sent_;
  const Bytes frame = receive_frame(timeout);
  Message reply;
  try {
    reply = decode(frame).message;
  } catch (const FrameError & e) {
    throw BridgeError(BridgeError::Kind::Protocol, std::string("bad reply frame: ") + e.what());
  }
  const auto * control = std::get_if<ControlMessage>(&reply);
  if (control == nullptr) {
    throw BridgeError(BridgeError::Kind::Protocol, "agent replied with a non-control message");
  }
  if (control->sim_time != msg.sim_time) {
    throw BridgeError(BridgeError::Kind::Protocol, "control reply does not echo the perception sim_time");
  }
  ++received_;
  return *control;
}

namespace
{

struct Endpoint
{
  enum class Scheme { InProc, Tcp } scheme;
  std::string name;
  std::string host;
  std::uint16_t port{0};
};

Endpoint parse_endpoint(const std::string & text)
{
  constexpr std::string_view inproc = "inproc://";
  constexpr std::string_view tcp = "tcp://";
  if (text.rfind(inproc, 0) == 0 && text.size() > inproc.size()) {
    return {Endpoint::Scheme::InProc, text.substr(inproc.size()), {}, 0};
  }
  if (text.rfind(tcp, 0) == 0) {
    const std::string rest = text.substr(tcp.size());
    const auto colon = rest.rfind(':');
    if (colon != std::string::npos && colon > 0 && colon + 1 < rest.size()) {
      const std::string port_text = rest.substr(colon + 1);
      char * end = nullptr;
      errno = 0;
      const long port = std::strtol(port_text.c_str(), &end, 10);
      if (errno == 0 && *end == '\0' && port >= 0 && port <= 65535) {
        return {Endpoint::Scheme::Tcp, {}, rest.substr(0, colon), static_cast<std::uint16_t>(port)};
      }
    }
  }
  throw BridgeError(BridgeError::Kind::BadEndpoint, "bad endpoint '" + text + "' (want inproc://<id> or tcp://<host>:<port>)");
}

// In-memory frame channel.

class FrameQueue
{
public:
  void push(Bytes frame)
  {
    {
      std::lock_guard lock(mutex_);
      frames_.push_back(std::move(frame));
    }
    cv_.notify_all();
  }

  void close()
  {
    {
      std::lock_guard lock(mutex_);
      closed_ = true;
    }
    cv_.notify_all();
  }

  /// Empty optional when closed and drained, or on timeout (sets timed_out).
  std::optional<Bytes> pop(std::optional<std::chrono::milliseconds> timeout, bool * timed_out = nullptr)
  {
    std::unique_lock lock(mutex_);
    const auto ready = [this] { return !frames_.empty() || closed_; };
    if (timeout) {
      if (!cv_.wait_for(lock, *timeout, ready)) {
        if (timed_out != nullptr) {
          *timed_out = true;
        }
        return std::nullopt;
      }
    } else {
      cv_.wait(lock, ready);
    }
    if (frames_.empty()) {
      return std::nullopt;
    }
    Bytes frame = std::move(frames_.front());
    frames_.pop_front();
    return frame;
  }

private:
  std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<Bytes> frames_;
  bool closed_{false};
};

class InProcessSession : public AgentSession
{
public:
  explicit InProcessSession(AgentHandler handler)
  : to_agent_(std::make_shared<FrameQueue>()), from_agent_(std::make_shared<FrameQueue>())
  {
    agent_ = std::thread([in = to_agent_, out = from_agent_, handler = std::move(handler)] {
      while (auto frame = in->pop(std::nullopt)) {
        try {
          const Decoded decoded = decode(*frame);
          const auto * perception = std::get_if<PerceptionMessage>(&decoded.message);
          if (perception == nullptr) {
            break;
          }
          out->push(encode(handler(*perception)));
        } catch (const std::exception &) {
          break;
        }
      }
      out->close();
    });
  }

  ~InProcessSession() override
  {
    to_agent_->close();
    if (!agent_.joinable()) {
      return;
    }
    // A timed-out handler may never return.
    if (timed_out_) {
      agent_.detach();
    } else {
      agent_.join();
    }
  }

protected:
  void send_frame(const Bytes & frame) override { to_agent_->push(frame); }

  Bytes receive_frame(std::chrono::milliseconds timeout) override
  {
    bool timed_out = false;
    auto frame = from_agent_->pop(timeout, &timed_out);
    if (!frame) {
      if (timed_out) {
        timed_out_ = true;
        throw BridgeError(BridgeError::Kind::Timeout, "agent did not reply in time");
      }
      throw BridgeError(BridgeError::Kind::Closed, "agent closed the session");
    }
    return std::move(*frame);
  }

private:
  std::shared_ptr<FrameQueue> to_agent_;
  std::shared_ptr<FrameQueue> from_agent_;
  std::thread agent_;
  bool timed_out_{false};
};

// In-process endpoint registry.

std::mutex & registry_mutex()
{
  static std::mutex mutex;
  return mutex;
}

std::map<std::string, AgentHandlerFactory> & registry()
{
  static std::map<std::string, AgentHandlerFactory> entries;
  return entries;
}

class InProcServer : public ServerHandle
{
public:
  InProcServer(std::string name, AgentHandlerFactory factory) : name_(std::move(name))
  {
    std::lock_guard lock(registry_mutex());
    if (!registry().emplace(name_, std::move(factory)).second) {
      throw BridgeError(BridgeError::Kind::BadEndpoint, "inproc://" + name_ + " is already served");
    }
  }

  ~InProcServer() override
  {
    std::lock_guard lock(registry_mutex());
    registry().erase(name_);
  }

  std::string endpoint() const override { return "inproc://" + name_; }

private:
  std::string name_;
};

// Socket helpers.

using Clock = std::chrono::steady_clock;

class Fd
{
public:
  explicit Fd(int fd = -1) : fd_(fd) {}
  Fd(const Fd &) = delete;
  Fd & operator=(const Fd &) = delete;
  Fd(Fd && other) noexcept : fd_(std::exchange(other.fd_, -1)) {}
  Fd & operator=(Fd && other) noexcept
  {
    reset();
    fd_ = std::exchange(other.fd_, -1);
    return *this;
  }
  ~Fd() { reset(); }
  void reset()
  {
    if (fd_ >= 0) {
      ::close(fd_);
      fd_ = -1;
    }
  }
  int get() const { return fd_; }

private:
  int fd_;
};

void set_nodelay(int fd)
{
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

void write_all(int fd, const Bytes & bytes)
{
  std::size_t done = 0;
  while (done < bytes.size()) {
    const ssize_t n = ::send(fd, bytes.data() + done, bytes.size() - done, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) {
        continue;
      }
      throw BridgeError(BridgeError::Kind::Closed, std::string("send failed: ") + std::strerror(errno));
    }
    done += static_cast<std::size_t>(n);
  }
}

enum class ReadStatus { Ok, Closed, Timeout, Stopped };

/// Reads exactly `n` bytes into `out`, waiting until `deadline` (if any) and
/// polling `stop` (if any) between short waits.
ReadStatus read_exact(
  int fd, std::uint8_t * out, std::size_t n, std::optional<Clock::time_point> deadline, const std::atomic<bool> * stop)
{
  std::size_t done = 0;
  while (done < n) {
    int wait_ms = 100;
    if (deadline) {
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(*deadline - Clock::now()).count();
      if (left <= 0) {
        return ReadStatus::Timeout;
      }
      wait_ms = static_cast<int>(std::min<long long>(left, stop != nullptr ? 100 : left));
    }
    if (stop != nullptr && stop->load()) {
      return ReadStatus::Stopped;
    }
    pollfd pfd{fd, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, (deadline || stop != nullptr) ? wait_ms : -1);
    if (ready < 0) {
      if (errno == EINTR) {
        continue;
      }
      return ReadStatus::Closed;
    }
    if (ready == 0) {
      continue;
    }
    const ssize_t got = ::recv(fd, out + done, n - done, 0);
    if (got == 0) {
      return ReadStatus::Closed;
    }
    if (got < 0) {
      if (errno == EINTR || errno == EAGAIN) {
        continue;
      }
      return ReadStatus::Closed;
    }
    done += static_cast<std::size_t>(got);
  }
  return ReadStatus::Ok;
}

ReadStatus read_frame(
  int fd, Bytes & frame, std::optional<Clock::time_point> deadline, const std::atomic<bool> * stop)
{
  frame.assign(kFrameHeaderSize, 0);
  ReadStatus status = read_exact(fd, frame.data(), kFrameHeaderSize, deadline, stop);
  if (status != ReadStatus::Ok) {
    return status;
  }
  const std::uint32_t n = peek_body_length(frame);
  if (n > kMaxFrameBody) {
    throw BridgeError(BridgeError::Kind::Protocol, "peer declared an oversized frame");
  }
  frame.resize(kFrameHeaderSize + n);
  return read_exact(fd, frame.data() + kFrameHeaderSize, n, deadline, stop);
}

class TcpSession : public AgentSession
{
public:
  explicit TcpSession(Fd fd) : fd_(std::move(fd)) {}

protected:
  void send_frame(const Bytes & frame) override { write_all(fd_.get(), frame); }

  Bytes receive_frame(std::chrono::milliseconds timeout) override
  {
    Bytes frame;
    switch (read_frame(fd_.get(), frame, Clock::now() + timeout, nullptr)) {
      case ReadStatus::Ok:
        return frame;
      case ReadStatus::Timeout:
        throw BridgeError(BridgeError::Kind::Timeout, "agent did not reply in time");
      default:
        throw BridgeError(BridgeError::Kind::Closed, "agent closed the connection");
    }
  }

private:
  Fd fd_;
};

addrinfo * resolve(const std::string & host, std::uint16_t port, bool passive)
{
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  hints.ai_flags = passive ? AI_PASSIVE : 0;
  addrinfo * result = nullptr;
  const std::string service = std::to_string(port);
  const int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &result);
  if (rc != 0) {
    throw BridgeError(BridgeError::Kind::BadEndpoint, "cannot resolve " + host + ": " + ::gai_strerror(rc));
  }
  return result;
}

class TcpServer : public ServerHandle
{
public:
  TcpServer(const std::string & host, std::uint16_t port, AgentHandlerFactory factory)
  : host_(host), factory_(std::move(factory))
  {
    addrinfo * info = resolve(host, port, true);
    listener_ = Fd(::socket(info->ai_family, info->ai_socktype, info->ai_protocol));
    if (listener_.get() < 0) {
      ::freeaddrinfo(info);
      throw BridgeError(BridgeError::Kind::BadEndpoint, std::string("socket: ") + std::strerror(errno));
    }
    int one = 1;
    ::setsockopt(listener_.get(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    const int bound = ::bind(listener_.get(), info->ai_addr, info->ai_addrlen);
    ::freeaddrinfo(info);
    if (bound != 0 || ::listen(listener_.get(), 16) != 0) {
      throw BridgeError(
        BridgeError::Kind::BadEndpoint, "cannot listen on " + host + ":" + std::to_string(port) + ": " +
                                          std::strerror(errno));
    }
    sockaddr_in addr{};
    socklen_t len = sizeof(addr);
    ::getsockname(listener_.get(), reinterpret_cast<sockaddr *>(&addr), &len);
    port_ = ntohs(addr.sin_port);
    acceptor_ = std::thread([this] { accept_loop(); });
  }

  ~TcpServer() override
  {
    stop_ = true;
    if (acceptor_.joinable()) {
      acceptor_.join();
    }
    std::lock_guard lock(mutex_);
    for (auto & worker : workers_) {
      if (worker.joinable()) {
        worker.join();
      }
    }
  }

  std::string endpoint() const override { return "tcp://" + host_ + ":" + std::to_string(port_); }

private:
  void accept_loop()
  {
    while (!stop_) {
      pollfd pfd{listener_.get(), POLLIN, 0};
      if (::poll(&pfd, 1, 50) <= 0) {
        continue;
      }
      const int fd = ::accept(listener_.get(), nullptr, nullptr);
      if (fd < 0) {
        continue;
      }
      set_nodelay(fd);
      AgentHandler handler = factory_();
      std::lock_guard lock(mutex_);
      workers_.emplace_back([this, fd, handler = std::move(handler)] {
        Fd owned(fd);
        serve_socket(owned.get(), handler, stop_);
      });
    }
  }

  std::string host_;
  std::uint16_t port_{0};
  AgentHandlerFactory factory_;
  Fd listener_;
  std::atomic<bool> stop_{false};
  std::thread acceptor_;
  std::mutex mutex_;
  std::list<std::thread> workers_;
};

}  // namespace

void serve_socket(int fd, const AgentHandler & handler, const std::atomic<bool> & stop)
{
  Bytes frame;
  try {
    while (read_frame(fd, frame, std::nullopt, &stop) == ReadStatus::Ok) {
      const Decoded decoded = decode(frame);
      const auto * perception = std::get_if<PerceptionMessage>(&decoded.message);
      if (perception == nullptr) {
        return;
      }
      write_all(fd, encode(handler(*perception)));
    }
  } catch (const std::exception &) {
    // The runner sees the closed connection and fails its exchange.
  }
}

std::unique_ptr<ServerHandle> serve(const std::string & endpoint, AgentHandlerFactory factory)
{
  const Endpoint ep = parse_endpoint(endpoint);
  if (ep.scheme == Endpoint::Scheme::InProc) {
    return std::make_unique<InProcServer>(ep.name, std::move(factory));
  }
  return std::make_unique<TcpServer>(ep.host, ep.port, std::move(factory));
}

std::unique_ptr<AgentSession> connect_in_process(AgentHandler handler)
{
  return std::make_unique<InProcessSession>(std::move(handler));
}

std::unique_ptr<AgentSession> connect(const std::string & endpoint)
{
  const Endpoint ep = parse_endpoint(endpoint);
  if (ep.scheme == Endpoint::Scheme::InProc) {
    AgentHandlerFactory factory;
    {
      std::lock_guard lock(registry_mutex());
      const auto it = registry().find(ep.name);
      if (it == registry().end()) {
        throw BridgeError(BridgeError::Kind::ConnectRefused, "nothing is served at " + endpoint);
      }
      factory = it->second;
    }
    return connect_in_process(factory());
  }
  addrinfo * info = resolve(ep.host, ep.port, false);
  Fd fd(::socket(info->ai_family, info->ai_socktype, info->ai_protocol));
  const int rc = fd.get() < 0 ? -1 : ::connect(fd.get(), info->ai_addr, info->ai_addrlen);
  const int err = errno;
  ::freeaddrinfo(info);
  if (rc != 0) {
    throw BridgeError(BridgeError::Kind::ConnectRefused, "cannot connect to " + endpoint + ": " + std::strerror(err));
  }
  set_nodelay(fd.get());
  return std::make_unique<TcpSession>(std::move(fd));
}

}  // namespace scenofuzz::bridge
