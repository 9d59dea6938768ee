#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "biomatch/wire.hpp"

namespace biomatch {

/// Bidirectional framed message channel.
class Channel {
 public:
  virtual ~Channel() = default;
  virtual void send(const Frame& frame) = 0;
  virtual Frame receive() = 0;
};

struct Endpoint {
  std::string host;
  std::uint16_t port = 0;
};

/// "host:port"; throws ConfigError.
Endpoint parse_endpoint(const std::string& text);

/// Owning file descriptor.
class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  Socket(Socket&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  Socket& operator=(Socket&& o) noexcept;
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  ~Socket();

  int fd() const { return fd_; }
  bool valid() const { return fd_ >= 0; }

 private:
  int fd_ = -1;
};

class TcpChannel final : public Channel {
 public:
  explicit TcpChannel(Socket socket) : socket_(std::move(socket)) {}
  static TcpChannel connect(const Endpoint& endpoint);

  void send(const Frame& frame) override;
  /// Throws IoError on a closed peer and FormatError on framing violations.
  Frame receive() override;

 private:
  Socket socket_;
};

class TcpListener {
 public:
  explicit TcpListener(const Endpoint& endpoint);

  std::uint16_t port() const { return port_; }
  /// Blocks for the next connection; returns an invalid socket once shut down.
  Socket accept();
  /// Unblocks accept(). Async-signal-safe.
  void shutdown() noexcept;

 private:
  Socket socket_;
  std::uint16_t port_ = 0;
};

}  // namespace biomatch
