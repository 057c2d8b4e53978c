#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include "mwem/prf.hpp"
#include "mwem/ring.hpp"
#include "mwem/tape.hpp"
#include "mwem/transport.hpp"

namespace mwem {

// Two-of-three replicated pair: party p holds summands (x_p, x_{p+1})
// of x = x_0 + x_1 + x_2 mod 2^64.
struct RepShare {
  ring_t a = 0;
  ring_t b = 0;
};

// Same replication over XOR: party p holds 64-bit words (w_p, w_{p+1})
// of w = w_0 ^ w_1 ^ w_2, used by the comparison circuits.
struct BoolShare {
  ring_t a = 0;
  ring_t b = 0;
};

// Why a value was reconstructed in the clear. Every open is logged so a
// run can be audited for plaintext exposure beyond the DP outputs.
enum class OpenKind { QueryIndex, Measurement, Diagnostic };

struct OpenRecord {
  OpenKind kind;
  std::size_t count;
};

// Dealer-side sharing (data holders, tests): uniform x_0, x_1 and
// x_2 = x - x_0 - x_1, distributed as pairs (x_p, x_{p+1}).
std::array<RepShare, 3> make_shares(ring_t x, std::mt19937_64& rng);
ring_t reconstruct_shares(const std::array<RepShare, 3>& s);

constexpr std::uint64_t kProtocolVersion = 1;

// One party's protocol state machine: local share algebra plus the
// interactive phases (multiply, truncate, open, input, joint bits).
// All interactive ops are batched and must be invoked by the three
// parties in identical order; the transport presents an ordered
// per-peer queue so phases stay in lockstep.
class PartyEngine {
 public:
  // Runs the session-setup handshake: exchanges protocol version and
  // codec with both neighbours, agrees pairwise PRF keys.
  // joint_bits supplies this party's contribution to jointly generated
  // randomness; pass nullptr for a fresh PRNG stream.
  PartyEngine(int id, Transport& transport, FixedCodec codec,
              std::uint64_t seed, std::unique_ptr<BitSource> joint_bits = nullptr);

  int id() const { return id_; }
  const FixedCodec& codec() const { return codec_; }
  Transport& transport() { return transport_; }

  // --- local algebra (zero communication) ---
  static RepShare add(RepShare x, RepShare y) { return {x.a + y.a, x.b + y.b}; }
  static RepShare sub(RepShare x, RepShare y) { return {x.a - y.a, x.b - y.b}; }
  static RepShare neg(RepShare x) { return {~x.a + 1, ~x.b + 1}; }
  static RepShare mul_public(RepShare x, ring_t c) { return {x.a * c, x.b * c}; }
  // Public constants ride on summand 0 by global convention, so the two
  // parties holding that summand apply them identically.
  RepShare add_public(RepShare x, ring_t c) const;
  RepShare public_share(ring_t c) const;

  // --- interactive phases ---
  // Replicated product; each party sends exactly one ring element per
  // input pair (its masked cross-term, to party p-1).
  std::vector<RepShare> mul(std::span<const RepShare> x,
                            std::span<const RepShare> y);

  // Rescales raw 2f-fractional-bit products back to f bits. Two-summand
  // re-sharing with a range-bounded mask; each side truncates its summand
  // locally. Result opens to trunc_plain(x) - {0,1} ulp provided the
  // encoded magnitude stays below 2^(63-sigma), sigma = 8.
  std::vector<RepShare> trunc(std::span<const RepShare> x);

  // Reconstruction: each party receives its missing summand from both
  // holders and aborts on mismatch.
  std::vector<ring_t> open(std::span<const RepShare> x, OpenKind kind);

  // Owner supplies `values`; the other two parties pass an empty span
  // and the matching count.
  std::vector<RepShare> input_shares(int owner, std::span<const ring_t> values,
                                     std::size_t count);

  // Shares of uniform bits no single party knows: each party inputs
  // `count` local bits, folded with b1 ^ b2 ^ b3 over the ring
  // (a ^ b = a + b - 2ab, two multiply phases).
  std::vector<RepShare> random_bit_shares(std::size_t count);

  // --- boolean domain ---
  static BoolShare bxor(BoolShare x, BoolShare y) { return {x.a ^ y.a, x.b ^ y.b}; }
  static BoolShare bshl(BoolShare x, int k) { return {x.a << k, x.b << k}; }
  static BoolShare bshr(BoolShare x, int k) { return {x.a >> k, x.b >> k}; }
  BoolShare bxor_public(BoolShare x, ring_t m) const;
  BoolShare bnot(BoolShare x) const { return bxor_public(x, ~ring_t(0)); }

  // Bitwise AND of XOR-shared words; one word sent per party per input.
  std::vector<BoolShare> band(std::span<const BoolShare> x,
                              std::span<const BoolShare> y);

  // Decomposes an arithmetic share into the three boolean sharings of
  // its summands; local, every component lands with the parties that
  // already hold it.
  std::array<BoolShare, 3> summand_bits(RepShare x) const;

  // XOR-shared bits (LSB of each word) -> arithmetic shares of the same
  // bits, via the XOR-to-arithmetic identity (two multiply phases).
  std::vector<RepShare> bits_to_arith(std::span<const BoolShare> bits);

  // --- scalar conveniences ---
  RepShare mul1(RepShare x, RepShare y);
  RepShare trunc1(RepShare x);
  ring_t open1(RepShare x, OpenKind kind);

  const std::vector<OpenRecord>& open_log() const { return open_log_; }
  std::mt19937_64& local_rng() { return rng_; }
  BitSource& joint_bits() { return *joint_bits_; }
  void set_joint_bits(std::unique_ptr<BitSource> bits) {
    joint_bits_ = std::move(bits);
  }

  // Non-interactive additive (resp. XOR) sharing of zero: every party's
  // outputs telescope to 0 across the ring, reproducible from the
  // pairwise keys and counters.
  ring_t zero_share_arith();
  ring_t zero_share_bool();

 private:
  std::uint64_t next_round() { return ++round_; }

  int id_;
  Transport& transport_;
  FixedCodec codec_;
  PairKey next_key_;  // shared with party id+1
  PairKey prev_key_;  // shared with party id-1
  std::mt19937_64 rng_;
  std::unique_ptr<BitSource> joint_bits_;
  std::uint64_t round_ = 0;
  std::vector<OpenRecord> open_log_;
};

}  // namespace mwem
