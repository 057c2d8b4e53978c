#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace mwem {

// All secure arithmetic happens in the ring of integers mod 2^64.
// Unsigned 64-bit arithmetic is exactly this ring: + - * wrap, never trap.
using ring_t = std::uint64_t;

inline std::int64_t to_signed(ring_t v) { return static_cast<std::int64_t>(v); }
inline ring_t to_ring(std::int64_t v) { return static_cast<ring_t>(v); }

// Reals are carried as x * 2^frac_bits in two's complement, so the
// representable range is [-2^(63-f), 2^(63-f)) with resolution 2^-f.
// Raw products of two encoded values carry 2f fractional bits until
// rescaled (see PartyEngine::trunc for the shared version).
struct FixedCodec {
  int frac_bits = 16;

  double scale() const { return std::exp2(frac_bits); }
  double resolution() const { return std::exp2(-frac_bits); }

  // round(x * 2^f) mod 2^64, rounding half away from zero.
  ring_t encode(double x) const { return encode_scaled(x, frac_bits); }

  // Same, with 2f fractional bits: the layout of an untruncated product.
  ring_t encode_raw_product(double x) const {
    return encode_scaled(x, 2 * frac_bits);
  }

  // Signed two's-complement interpretation divided by 2^f.
  double decode(ring_t e) const {
    return static_cast<double>(to_signed(e)) / scale();
  }

  // Arithmetic shift right by f on the signed view: rescales a raw
  // product back to f fractional bits, rounding toward -inf. Plaintext
  // reference for the shared truncation protocol.
  ring_t trunc(ring_t e) const { return to_ring(to_signed(e) >> frac_bits); }

 private:
  static ring_t encode_scaled(double x, int bits) {
    const double scaled = x * std::exp2(bits);
    if (!(std::fabs(scaled) < 9223372036854775808.0)) {  // 2^63
      throw std::out_of_range("fixed-point encode: value " +
                              std::to_string(x) + " out of range for " +
                              std::to_string(bits) + " fractional bits");
    }
    return to_ring(std::llround(scaled));
  }
};

}  // namespace mwem
