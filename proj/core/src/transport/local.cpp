#include "kep/transport/local.hpp"

#include <string>

#include "kep/error.hpp"

namespace kep::transport {

class LocalChannel final : public Channel {
 public:
  LocalChannel(LocalHub& hub, PeerId self) : Channel(self), hub_(hub) {}
  ~LocalChannel() override { close(); }

 protected:
  void write_frame(PeerId to, Bytes frame) override {
    auto& q = hub_.queue(self(), to);
    {
      std::lock_guard lock(q.mutex);
      if (q.closed) throw ChannelClosed("peer " + std::to_string(to) + " closed");
      q.frames.push_back(std::move(frame));
    }
    q.ready.notify_one();
  }

  Bytes read_frame(PeerId from) override {
    auto& q = hub_.queue(from, self());
    std::unique_lock lock(q.mutex);
    q.ready.wait(lock, [&] { return !q.frames.empty() || q.closed; });
    if (q.frames.empty()) throw ChannelClosed("peer " + std::to_string(from) + " closed");
    Bytes frame = std::move(q.frames.front());
    q.frames.pop_front();
    return frame;
  }

  void on_close() override {
    // Closing an endpoint closes both directions of its channels; queued
    // frames stay readable by the other side.
    for (PeerId other = 0; other < kNumPeers; ++other) {
      if (other == self()) continue;
      for (auto* q : {&hub_.queue(self(), other), &hub_.queue(other, self())}) {
        {
          std::lock_guard lock(q->mutex);
          q->closed = true;
        }
        q->ready.notify_all();
      }
    }
  }

 private:
  LocalHub& hub_;
};

std::unique_ptr<Channel> LocalHub::endpoint(PeerId peer) {
  if (peer >= kNumPeers) throw InvalidArgument("peer id out of range: " + std::to_string(peer));
  std::lock_guard lock(claim_mutex_);
  if (claimed_[peer]) throw InvalidArgument("endpoint already claimed: " + std::to_string(peer));
  claimed_[peer] = true;
  return std::make_unique<LocalChannel>(*this, peer);
}

void LocalHub::close_all() {
  for (auto& q : queues_) {
    {
      std::lock_guard lock(q.mutex);
      q.closed = true;
    }
    q.ready.notify_all();
  }
}

}  // namespace kep::transport
