#pragma once

#include <array>
#include <memory>
#include <string>
#include <thread>

#include "mwem/transport.hpp"

namespace mwem {

// Full-mesh TCP transport. Every party listens on its own address; for
// each party pair the lower id accepts and the higher id dials, and the
// coordinator dials all three parties. A dialing endpoint identifies
// itself with a single preamble byte before framed traffic starts.
class TcpTransport : public Transport {
 public:
  // listen_address is empty for the coordinator (it only dials).
  // party_addresses are the three parties' listen addresses, used by
  // higher-id parties and the coordinator to reach them.
  TcpTransport(int self, const std::string& listen_address,
               const std::array<std::string, 3>& party_addresses,
               bool expect_coordinator,
               std::chrono::milliseconds dial_timeout =
                   std::chrono::milliseconds(20000));
  ~TcpTransport() override;

  void send(int peer, Frame f) override;

 protected:
  FrameQueue& rx_queue(int peer) override { return queues_[peer]; }

 private:
  void reader_loop(int peer, int fd);
  void fail_all();

  std::array<int, kMaxEndpoints> fds_;
  std::array<FrameQueue, kMaxEndpoints> queues_;
  std::array<std::unique_ptr<std::mutex>, kMaxEndpoints> write_mu_;
  std::vector<std::thread> readers_;
};

}  // namespace mwem
