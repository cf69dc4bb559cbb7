#pragma once

#include <array>
#include <condition_variable>
#include <deque>
#include <memory>
#include <mutex>

#include "kep/transport/channel.hpp"

namespace kep::transport {

/// In-process message hub connecting three endpoints through unbounded FIFO
/// queues. The hub must outlive its endpoints.
class LocalHub {
 public:
  LocalHub() = default;
  LocalHub(const LocalHub&) = delete;
  LocalHub& operator=(const LocalHub&) = delete;

  /// Endpoint for `peer`; each peer id can be claimed once.
  std::unique_ptr<Channel> endpoint(PeerId peer);

  /// Closes every queue, waking blocked receivers with ChannelClosed.
  void close_all();

 private:
  friend class LocalChannel;

  struct Queue {
    std::mutex mutex;
    std::condition_variable ready;
    std::deque<Bytes> frames;
    bool closed = false;
  };

  Queue& queue(PeerId from, PeerId to) { return queues_[from * kNumPeers + to]; }

  std::array<Queue, kNumPeers * kNumPeers> queues_;
  std::array<bool, kNumPeers> claimed_{};
  std::mutex claim_mutex_;
};

}  // namespace kep::transport
