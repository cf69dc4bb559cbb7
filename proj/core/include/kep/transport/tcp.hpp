#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "kep/transport/channel.hpp"

namespace kep::transport {

struct Endpoint {
  std::string host;
  std::uint16_t port = 0;

  /// Parses "host:port".
  static Endpoint parse(const std::string& text);
  std::string to_string() const;
};

/// Bound, listening socket. Port 0 picks an ephemeral port, readable via port().
class TcpListener {
 public:
  explicit TcpListener(std::uint16_t port, const std::string& bind_host = "0.0.0.0");
  ~TcpListener();
  TcpListener(TcpListener&& other) noexcept;
  TcpListener& operator=(TcpListener&&) = delete;
  TcpListener(const TcpListener&) = delete;

  std::uint16_t port() const noexcept { return port_; }
  int release() noexcept;

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

/// Connects peer `self` to the other two peers. Lower ids accept, higher ids
/// connect; each connection starts with a 4-byte peer id handshake.
/// `endpoints[i]` is where peer i listens.
std::unique_ptr<Channel> tcp_connect(PeerId self, TcpListener listener,
                                     const std::vector<Endpoint>& endpoints,
                                     std::chrono::milliseconds timeout = std::chrono::seconds(30));

}  // namespace kep::transport
