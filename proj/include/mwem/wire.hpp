#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mwem/ring.hpp"

namespace mwem {

// One framed message between two endpoints.
//
// Wire layout, fixed for interoperability:
//   4 bytes  big-endian    payload length in bytes (8 * element count)
//   1 byte                 message type
//   8 bytes  big-endian    round counter
//   1 byte                 sender id (0-2 parties, 3 coordinator)
//   N*8 bytes little-endian ring elements
enum class MsgType : std::uint8_t {
  Data = 0x01,
  Setup = 0x02,
  OpenBroadcast = 0x03,
};

struct Frame {
  MsgType type = MsgType::Data;
  std::uint64_t round = 0;
  std::uint8_t sender = 0;
  std::vector<ring_t> payload;

  std::size_t wire_size() const { return 14 + 8 * payload.size(); }
};

std::vector<std::uint8_t> encode_frame(const Frame& f);

// Parses one frame from the start of `buf`. Returns nothing if fewer
// bytes than a whole frame are available; throws on a malformed header.
std::optional<Frame> decode_frame(const std::uint8_t* buf, std::size_t len,
                                  std::size_t* consumed);

}  // namespace mwem
