#include "mwem/wire.hpp"

#include <stdexcept>

namespace mwem {

namespace {

void put_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void put_be64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) {
    out.push_back(static_cast<std::uint8_t>(v >> shift));
  }
}

void put_le64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int shift = 0; shift < 64; shift += 8) {
    out.push_back(static_cast<std::uint8_t>(v >> shift));
  }
}

std::uint32_t get_be32(const std::uint8_t* p) {
  return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
         (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
}

std::uint64_t get_be64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; i++) v = (v << 8) | p[i];
  return v;
}

std::uint64_t get_le64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; i--) v = (v << 8) | p[i];
  return v;
}

}  // namespace

std::vector<std::uint8_t> encode_frame(const Frame& f) {
  std::vector<std::uint8_t> out;
  out.reserve(f.wire_size());
  put_be32(out, static_cast<std::uint32_t>(8 * f.payload.size()));
  out.push_back(static_cast<std::uint8_t>(f.type));
  put_be64(out, f.round);
  out.push_back(f.sender);
  for (ring_t e : f.payload) put_le64(out, e);
  return out;
}

std::optional<Frame> decode_frame(const std::uint8_t* buf, std::size_t len,
                                  std::size_t* consumed) {
  if (len < 14) return std::nullopt;
  const std::uint32_t payload_bytes = get_be32(buf);
  if (payload_bytes % 8 != 0) {
    throw std::runtime_error("malformed frame: payload length not a multiple of 8");
  }
  const std::uint8_t type = buf[4];
  if (type != 0x01 && type != 0x02 && type != 0x03) {
    throw std::runtime_error("malformed frame: unknown message type");
  }
  if (len < 14 + std::size_t(payload_bytes)) return std::nullopt;

  Frame f;
  f.type = static_cast<MsgType>(type);
  f.round = get_be64(buf + 5);
  f.sender = buf[13];
  f.payload.resize(payload_bytes / 8);
  for (std::size_t i = 0; i < f.payload.size(); i++) {
    f.payload[i] = get_le64(buf + 14 + 8 * i);
  }
  if (consumed) *consumed = 14 + payload_bytes;
  return f;
}

}  // namespace mwem
