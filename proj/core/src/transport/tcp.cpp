#include "kep/transport/tcp.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <cstring>
#include <string>
#include <thread>

#include "kep/error.hpp"

namespace kep::transport {

namespace {

std::string errno_text() { return std::strerror(errno); }

void write_all(int fd, const std::uint8_t* data, std::size_t size) {
  while (size > 0) {
    const ssize_t n = ::send(fd, data, size, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw PeerUnreachable("send failed: " + errno_text());
    }
    data += n;
    size -= static_cast<std::size_t>(n);
  }
}

void read_all(int fd, std::uint8_t* data, std::size_t size) {
  while (size > 0) {
    const ssize_t n = ::recv(fd, data, size, 0);
    if (n == 0) throw ChannelClosed("connection closed by peer");
    if (n < 0) {
      if (errno == EINTR) continue;
      throw PeerUnreachable("recv failed: " + errno_text());
    }
    data += n;
    size -= static_cast<std::size_t>(n);
  }
}

void set_nodelay(int fd) {
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

int connect_with_retry(const Endpoint& ep, std::chrono::steady_clock::time_point deadline) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* result = nullptr;
  const std::string port = std::to_string(ep.port);
  if (::getaddrinfo(ep.host.c_str(), port.c_str(), &hints, &result) != 0 || result == nullptr) {
    throw PeerUnreachable("cannot resolve " + ep.to_string());
  }
  for (;;) {
    const int fd = ::socket(result->ai_family, result->ai_socktype, result->ai_protocol);
    if (fd < 0) {
      ::freeaddrinfo(result);
      throw PeerUnreachable("socket: " + errno_text());
    }
    if (::connect(fd, result->ai_addr, result->ai_addrlen) == 0) {
      ::freeaddrinfo(result);
      set_nodelay(fd);
      return fd;
    }
    ::close(fd);
    if (std::chrono::steady_clock::now() > deadline) {
      ::freeaddrinfo(result);
      throw PeerUnreachable("cannot connect to " + ep.to_string());
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
}

int accept_before(int listen_fd, std::chrono::steady_clock::time_point deadline) {
  for (;;) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) throw PeerUnreachable("timed out waiting for peer connection");
    pollfd p{listen_fd, POLLIN, 0};
    const int ready = ::poll(&p, 1, static_cast<int>(left.count()));
    if (ready < 0 && errno != EINTR) throw PeerUnreachable("poll: " + errno_text());
    if (ready <= 0) continue;
    const int fd = ::accept(listen_fd, nullptr, nullptr);
    if (fd < 0) {
      if (errno == EINTR) continue;
      throw PeerUnreachable("accept: " + errno_text());
    }
    set_nodelay(fd);
    return fd;
  }
}

class TcpChannel final : public Channel {
 public:
  TcpChannel(PeerId self, std::array<int, kNumPeers> fds) : Channel(self), fds_(fds) {}
  ~TcpChannel() override { close(); }

 protected:
  void write_frame(PeerId to, Bytes frame) override {
    write_all(fds_[to], frame.data(), frame.size());
  }

  Bytes read_frame(PeerId from) override {
    Bytes frame(kFrameHeaderSize);
    read_all(fds_[from], frame.data(), kFrameHeaderSize);
    const auto [length, tag] = decode_header(frame);
    frame.resize(kFrameHeaderSize + length);
    read_all(fds_[from], frame.data() + kFrameHeaderSize, length);
    return frame;
  }

  // Large rounds could deadlock if every peer blocked in send() on a full
  // socket buffer, so writes and reads are multiplexed with poll().
  std::map<PeerId, Bytes> transfer(std::vector<std::pair<PeerId, Bytes>> frames,
                                   std::span<const PeerId> expect_from) override {
    struct Pending {
      Bytes data;
      std::size_t done = 0;
      bool header_only = true;  // reads: still collecting the header
    };
    std::map<PeerId, Pending> writes;
    for (auto& [to, frame] : frames) writes[to].data = std::move(frame);
    std::map<PeerId, Pending> reads;
    for (PeerId from : expect_from) reads[from].data.resize(kFrameHeaderSize);

    auto write_left = [&] {
      for (auto& [p, w] : writes) if (w.done < w.data.size()) return true;
      return false;
    };
    auto read_left = [&] {
      for (auto& [p, r] : reads) if (r.header_only || r.done < r.data.size()) return true;
      return false;
    };

    while (write_left() || read_left()) {
      std::vector<pollfd> polls;
      std::vector<std::pair<PeerId, bool>> what;  // (peer, is_write)
      for (auto& [p, w] : writes) {
        if (w.done < w.data.size()) {
          polls.push_back({fds_[p], POLLOUT, 0});
          what.emplace_back(p, true);
        }
      }
      for (auto& [p, r] : reads) {
        if (r.header_only || r.done < r.data.size()) {
          polls.push_back({fds_[p], POLLIN, 0});
          what.emplace_back(p, false);
        }
      }
      if (::poll(polls.data(), polls.size(), -1) < 0) {
        if (errno == EINTR) continue;
        throw PeerUnreachable("poll: " + errno_text());
      }
      for (std::size_t i = 0; i < polls.size(); ++i) {
        if (polls[i].revents == 0) continue;
        const auto [peer, is_write] = what[i];
        if (is_write) {
          auto& w = writes[peer];
          const ssize_t n = ::send(fds_[peer], w.data.data() + w.done, w.data.size() - w.done,
                                   MSG_NOSIGNAL | MSG_DONTWAIT);
          if (n < 0) {
            if (errno == EAGAIN || errno == EWOULDBLOCK || errno == EINTR) continue;
            throw PeerUnreachable("send failed: " + errno_text());
          }
          w.done += static_cast<std::size_t>(n);
        } else {
          auto& r = reads[peer];
          const ssize_t n = ::recv(fds_[peer], r.data.data() + r.done, r.data.size() - r.done,
                                   MSG_DONTWAIT);
          if (n == 0) throw ChannelClosed("connection closed by peer");
          if (n < 0) {
            if (errno == EAGAIN || errno == EWOULDBLOCK || errno == EINTR) continue;
            throw PeerUnreachable("recv failed: " + errno_text());
          }
          r.done += static_cast<std::size_t>(n);
          if (r.header_only && r.done == kFrameHeaderSize) {
            r.header_only = false;
            const auto [length, tag] = decode_header(r.data);
            r.data.resize(kFrameHeaderSize + length);
          }
        }
      }
    }

    std::map<PeerId, Bytes> raw;
    for (auto& [p, r] : reads) raw.emplace(p, std::move(r.data));
    return raw;
  }

  void on_close() override {
    for (int& fd : fds_) {
      if (fd >= 0) {
        ::shutdown(fd, SHUT_RDWR);
        ::close(fd);
        fd = -1;
      }
    }
  }

 private:
  std::array<int, kNumPeers> fds_;
};

}  // namespace

Endpoint Endpoint::parse(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == text.size()) {
    throw InvalidArgument("endpoint must be host:port, got '" + text + "'");
  }
  Endpoint ep;
  ep.host = text.substr(0, colon);
  const std::string port = text.substr(colon + 1);
  std::size_t used = 0;
  unsigned long value = 0;
  try {
    value = std::stoul(port, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != port.size() || value == 0 || value > 65535) {
    throw InvalidArgument("invalid port in endpoint '" + text + "'");
  }
  ep.port = static_cast<std::uint16_t>(value);
  return ep;
}

std::string Endpoint::to_string() const { return host + ":" + std::to_string(port); }

TcpListener::TcpListener(std::uint16_t port, const std::string& bind_host) {
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) throw PeerUnreachable("socket: " + errno_text());
  int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, bind_host.c_str(), &addr.sin_addr) != 1) {
    ::close(fd_);
    throw InvalidArgument("invalid bind address " + bind_host);
  }
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 ||
      ::listen(fd_, 4) != 0) {
    const std::string msg = errno_text();
    ::close(fd_);
    throw PeerUnreachable("cannot listen on port " + std::to_string(port) + ": " + msg);
  }
  socklen_t len = sizeof(addr);
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

TcpListener::~TcpListener() {
  if (fd_ >= 0) ::close(fd_);
}

TcpListener::TcpListener(TcpListener&& other) noexcept : fd_(other.fd_), port_(other.port_) {
  other.fd_ = -1;
}

int TcpListener::release() noexcept {
  const int fd = fd_;
  fd_ = -1;
  return fd;
}

std::unique_ptr<Channel> tcp_connect(PeerId self, TcpListener listener,
                                     const std::vector<Endpoint>& endpoints,
                                     std::chrono::milliseconds timeout) {
  if (self >= kNumPeers) throw InvalidArgument("peer id out of range");
  if (endpoints.size() != kNumPeers) throw InvalidArgument("need exactly three endpoints");
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  std::array<int, kNumPeers> fds{-1, -1, -1};
  const int listen_fd = listener.release();

  try {
    for (PeerId other = 0; other < self; ++other) {
      const int fd = connect_with_retry(endpoints[other], deadline);
      fds[other] = fd;
      std::array<std::uint8_t, 4> hello{static_cast<std::uint8_t>(self), 0, 0, 0};
      write_all(fd, hello.data(), hello.size());
    }
    for (PeerId count = self + 1; count < kNumPeers; ++count) {
      const int fd = accept_before(listen_fd, deadline);
      std::array<std::uint8_t, 4> hello{};
      read_all(fd, hello.data(), hello.size());
      const PeerId who = hello[0];
      if (who <= self || who >= kNumPeers || fds[who] >= 0) {
        ::close(fd);
        throw PeerUnreachable("unexpected handshake from peer " + std::to_string(who));
      }
      fds[who] = fd;
    }
  } catch (...) {
    for (int fd : fds) {
      if (fd >= 0) ::close(fd);
    }
    ::close(listen_fd);
    throw;
  }
  ::close(listen_fd);
  return std::make_unique<TcpChannel>(self, fds);
}

}  // namespace kep::transport
