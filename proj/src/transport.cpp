#include "mwem/transport.hpp"

#include <algorithm>

namespace mwem {

void FrameQueue::push(Frame f) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    frames_.push_back(std::move(f));
  }
  cv_.notify_all();
}

void FrameQueue::close() {
  {
    std::lock_guard<std::mutex> lock(mu_);
    closed_ = true;
  }
  cv_.notify_all();
}

Frame FrameQueue::pop_matching(MsgType type, std::uint64_t round,
                               std::chrono::milliseconds timeout) {
  std::unique_lock<std::mutex> lock(mu_);
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    auto it = std::find_if(frames_.begin(), frames_.end(), [&](const Frame& f) {
      return f.type == type && f.round == round;
    });
    if (it != frames_.end()) {
      Frame f = std::move(*it);
      frames_.erase(it);
      return f;
    }
    if (closed_) throw ProtocolError("peer connection closed");
    if (cv_.wait_until(lock, deadline) == std::cv_status::timeout) {
      throw ProtocolError("timed out waiting for round " +
                          std::to_string(round));
    }
  }
}

Frame Transport::recv(int peer, MsgType type, std::uint64_t round) {
  Frame f = rx_queue(peer).pop_matching(type, round, recv_timeout);
  bytes_received_ += f.wire_size();
  return f;
}

void Transport::count_send(const Frame& f) {
  bytes_sent_ += f.wire_size();
  elements_sent_ += f.payload.size();
}

class MemHub::MemTransport : public Transport {
 public:
  MemTransport(int self, std::shared_ptr<Shared> shared)
      : Transport(self), shared_(std::move(shared)) {}

  void send(int peer, Frame f) override {
    f.sender = static_cast<std::uint8_t>(self_);
    count_send(f);
    shared_->inbox[peer][self_].push(std::move(f));
  }

 protected:
  FrameQueue& rx_queue(int peer) override {
    return shared_->inbox[self_][peer];
  }

 private:
  std::shared_ptr<Shared> shared_;
};

std::unique_ptr<Transport> MemHub::endpoint(int id) {
  return std::make_unique<MemTransport>(id, shared_);
}

void MemHub::close_all() {
  for (auto& row : shared_->inbox) {
    for (auto& q : row) q.close();
  }
}

}  // namespace mwem
