#include "biomatch/net.hpp"

#include <cerrno>
#include <cstring>

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include "biomatch/error.hpp"

namespace biomatch {
namespace {

[[noreturn]] void fail(const std::string& what) { throw IoError(what + ": " + std::strerror(errno)); }

void read_exact(int fd, std::uint8_t* dst, std::size_t n) {
  while (n > 0) {
    const ssize_t got = ::recv(fd, dst, n, 0);
    if (got == 0) throw IoError("connection closed by peer");
    if (got < 0) {
      if (errno == EINTR) continue;
      fail("recv");
    }
    dst += got;
    n -= static_cast<std::size_t>(got);
  }
}

}  // namespace

Endpoint parse_endpoint(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos || colon + 1 == text.size()) throw ConfigError("endpoint must be host:port");
  Endpoint e;
  e.host = text.substr(0, colon);
  if (e.host.empty()) e.host = "127.0.0.1";
  try {
    const int port = std::stoi(text.substr(colon + 1));
    if (port < 0 || port > 65535) throw ConfigError("port out of range");
    e.port = static_cast<std::uint16_t>(port);
  } catch (const std::logic_error&) {
    throw ConfigError("bad port in endpoint " + text);
  }
  return e;
}

Socket& Socket::operator=(Socket&& o) noexcept {
  if (this != &o) {
    if (fd_ >= 0) ::close(fd_);
    fd_ = std::exchange(o.fd_, -1);
  }
  return *this;
}

Socket::~Socket() {
  if (fd_ >= 0) ::close(fd_);
}

TcpChannel TcpChannel::connect(const Endpoint& endpoint) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const std::string port = std::to_string(endpoint.port);
  if (int rc = ::getaddrinfo(endpoint.host.c_str(), port.c_str(), &hints, &res); rc != 0)
    throw IoError("cannot resolve " + endpoint.host + ": " + ::gai_strerror(rc));
  Socket sock;
  for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
    Socket candidate(::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol));
    if (!candidate.valid()) continue;
    if (::connect(candidate.fd(), ai->ai_addr, ai->ai_addrlen) == 0) {
      sock = std::move(candidate);
      break;
    }
  }
  ::freeaddrinfo(res);
  if (!sock.valid()) fail("cannot connect to " + endpoint.host + ":" + port);
  int one = 1;
  ::setsockopt(sock.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  return TcpChannel(std::move(sock));
}

void TcpChannel::send(const Frame& frame) {
  const Bytes bytes = encode_frame(frame);
  std::size_t off = 0;
  while (off < bytes.size()) {
    const ssize_t n = ::send(socket_.fd(), bytes.data() + off, bytes.size() - off, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      fail("send");
    }
    off += static_cast<std::size_t>(n);
  }
}

Frame TcpChannel::receive() {
  std::uint8_t header[kFrameHeaderSize];
  read_exact(socket_.fd(), header, sizeof header);
  const FrameHeader h = decode_frame_header(header);
  Frame frame{h.type, Bytes(h.length)};
  if (h.length > 0) read_exact(socket_.fd(), frame.payload.data(), h.length);
  return frame;
}

TcpListener::TcpListener(const Endpoint& endpoint) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  hints.ai_flags = AI_PASSIVE;
  addrinfo* res = nullptr;
  const std::string port = std::to_string(endpoint.port);
  if (int rc = ::getaddrinfo(endpoint.host.c_str(), port.c_str(), &hints, &res); rc != 0)
    throw IoError("cannot resolve " + endpoint.host + ": " + ::gai_strerror(rc));
  for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
    Socket candidate(::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol));
    if (!candidate.valid()) continue;
    int one = 1;
    ::setsockopt(candidate.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    if (::bind(candidate.fd(), ai->ai_addr, ai->ai_addrlen) == 0 && ::listen(candidate.fd(), 64) == 0) {
      socket_ = std::move(candidate);
      break;
    }
  }
  ::freeaddrinfo(res);
  if (!socket_.valid()) fail("cannot listen on " + endpoint.host + ":" + port);

  sockaddr_storage addr{};
  socklen_t len = sizeof addr;
  if (::getsockname(socket_.fd(), reinterpret_cast<sockaddr*>(&addr), &len) != 0) fail("getsockname");
  port_ = ntohs(addr.ss_family == AF_INET6 ? reinterpret_cast<sockaddr_in6*>(&addr)->sin6_port
                                           : reinterpret_cast<sockaddr_in*>(&addr)->sin_port);
}

Socket TcpListener::accept() {
  for (;;) {
    const int fd = ::accept(socket_.fd(), nullptr, nullptr);
    if (fd >= 0) {
      int one = 1;
      ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
      return Socket(fd);
    }
    if (errno == EINTR) continue;
    return Socket();
  }
}

void TcpListener::shutdown() noexcept { ::shutdown(socket_.fd(), SHUT_RDWR); }

}  // namespace biomatch
