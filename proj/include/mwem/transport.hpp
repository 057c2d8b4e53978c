#pragma once

#include <array>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>

#include "mwem/errors.hpp"
#include "mwem/wire.hpp"

namespace mwem {

constexpr int kNumParties = 3;
constexpr int kCoordinatorId = 3;
constexpr int kMaxEndpoints = 4;

// Per-peer ordered inbox. Frames may arrive ahead of the protocol thread;
// recv matches on (type, round) and keeps everything else buffered.
class FrameQueue {
 public:
  void push(Frame f);
  void close();
  Frame pop_matching(MsgType type, std::uint64_t round,
                     std::chrono::milliseconds timeout);

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Frame> frames_;
  bool closed_ = false;
};

// One endpoint's view of the full mesh. Implementations must deliver
// frames between any fixed pair in send order and never drop them while
// the connection is healthy.
class Transport {
 public:
  explicit Transport(int self) : self_(self) {}
  virtual ~Transport() = default;

  virtual void send(int peer, Frame f) = 0;
  virtual Frame recv(int peer, MsgType type, std::uint64_t round);

  int self() const { return self_; }

  std::uint64_t bytes_sent() const { return bytes_sent_; }
  std::uint64_t bytes_received() const { return bytes_received_; }
  std::uint64_t elements_sent() const { return elements_sent_; }

  std::chrono::milliseconds recv_timeout{60000};

 protected:
  virtual FrameQueue& rx_queue(int peer) = 0;
  void count_send(const Frame& f);

  int self_;
  std::uint64_t bytes_sent_ = 0;
  std::uint64_t bytes_received_ = 0;
  std::uint64_t elements_sent_ = 0;
};

// In-process transport: endpoints exchange frames through a shared hub of
// queues. Used by the simulation mode and the test suites.
class MemHub {
 public:
  std::unique_ptr<Transport> endpoint(int id);

  // Wakes every blocked receiver; used when one simulated party fails so
  // the others stop instead of waiting out their timeouts.
  void close_all();

 private:
  struct Shared {
    // inbox[receiver][sender]
    std::array<std::array<FrameQueue, kMaxEndpoints>, kMaxEndpoints> inbox;
  };
  class MemTransport;
  std::shared_ptr<Shared> shared_ = std::make_shared<Shared>();
};

}  // namespace mwem
