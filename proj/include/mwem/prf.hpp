#pragma once

#include <array>
#include <cstdint>

#include "mwem/ring.hpp"

namespace mwem {

// 128-bit PRF key shared between one adjacent pair of parties.
using PrfKey = std::array<std::uint64_t, 2>;

// SipHash-2-4 of a (domain, counter) pair under a 128-bit key.
// Used as the keyed PRF behind non-interactive zero sharings and the
// correlated masks of the truncation protocol.
std::uint64_t prf_eval(const PrfKey& key, std::uint64_t domain,
                       std::uint64_t counter);

// Domain separators so distinct protocol uses never collide on a counter.
enum class PrfDomain : std::uint64_t {
  ZeroShareArith = 1,
  ZeroShareBool = 2,
  TruncMask = 3,
  ReshareMask = 4,
};

// Pairwise key plus the counter both holders advance in lockstep.
// Counters stay synchronized because the protocol is deterministic:
// both parties of a pair invoke the same ops in the same order.
struct PairKey {
  PrfKey key{};
  std::uint64_t counter = 0;

  std::uint64_t next(PrfDomain domain) {
    return prf_eval(key, static_cast<std::uint64_t>(domain), counter++);
  }
};

}  // namespace mwem
