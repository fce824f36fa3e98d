#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>

#include "gpc/wire.hpp"

// Thin RAII wrappers over blocking IPv4 sockets. Read timeouts use
// SO_RCVTIMEO and surface as TimedOut; a zero return from read_some means
// the peer closed.

namespace gpc::net {

class Socket : public wire::ByteStream {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  ~Socket() override { close(); }

  Socket(Socket&& other) noexcept : fd_(other.fd_) { other.fd_ = -1; }
  Socket& operator=(Socket&& other) noexcept;
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;

  // Throws ConnectFailed.
  static Socket connect_to(const std::string& host, std::uint16_t port);

  std::size_t read_some(std::span<std::uint8_t> out) override;
  void write_all(std::span<const std::uint8_t> data) override;

  void set_read_timeout(std::chrono::milliseconds timeout);
  std::string peer() const;  // "ip:port", best effort
  bool valid() const { return fd_ >= 0; }
  void close();

 private:
  int fd_ = -1;
};

class Listener {
 public:
  // Throws BindFailed. Port 0 binds an ephemeral port; port() reports the
  // actual one.
  Listener(const std::string& bind_addr, std::uint16_t port);
  ~Listener() { close(); }

  Listener(const Listener&) = delete;
  Listener& operator=(const Listener&) = delete;

  std::uint16_t port() const { return port_; }

  // Waits up to the given time for a connection; nullopt on timeout.
  std::optional<Socket> accept_for(std::chrono::milliseconds wait);

  void close();

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

}  // namespace gpc::net
