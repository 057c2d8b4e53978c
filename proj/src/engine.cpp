#include "mwem/engine.hpp"

#include <stdexcept>
#include <string>

namespace mwem {

namespace {

constexpr ring_t kTwo62 = ring_t(1) << 62;

int next_party(int p) { return (p + 1) % 3; }
int prev_party(int p) { return (p + 2) % 3; }

}  // namespace

std::array<RepShare, 3> make_shares(ring_t x, std::mt19937_64& rng) {
  const ring_t x0 = rng();
  const ring_t x1 = rng();
  const ring_t x2 = x - x0 - x1;
  return {RepShare{x0, x1}, RepShare{x1, x2}, RepShare{x2, x0}};
}

ring_t reconstruct_shares(const std::array<RepShare, 3>& s) {
  for (int p = 0; p < 3; p++) {
    if (s[p].b != s[(p + 1) % 3].a) {
      throw ConsistencyError("replicated components disagree");
    }
  }
  return s[0].a + s[1].a + s[2].a;
}

PartyEngine::PartyEngine(int id, Transport& transport, FixedCodec codec,
                         std::uint64_t seed,
                         std::unique_ptr<BitSource> joint_bits)
    : id_(id),
      transport_(transport),
      codec_(codec),
      rng_(seed),
      joint_bits_(std::move(joint_bits)) {
  if (id < 0 || id >= kNumParties) {
    throw std::invalid_argument("party id must be 0, 1 or 2");
  }
  if (!joint_bits_) {
    joint_bits_ = std::make_unique<PrngBits>(seed ^ 0xa5a5a5a512345678ULL);
  }

  // Session setup: push our pair key to the next party, take the
  // previous party's, and refuse to run under mismatched parameters.
  next_key_.key = {rng_(), rng_()};
  Frame hello;
  hello.type = MsgType::Setup;
  hello.round = 0;
  hello.payload = {kProtocolVersion, 64, ring_t(codec_.frac_bits),
                   next_key_.key[0], next_key_.key[1]};
  transport_.send(next_party(id_), hello);

  Frame peer = transport_.recv(prev_party(id_), MsgType::Setup, 0);
  if (peer.payload.size() != 5 || peer.payload[0] != kProtocolVersion) {
    throw ProtocolError("session setup: protocol version mismatch");
  }
  if (peer.payload[1] != 64 || peer.payload[2] != ring_t(codec_.frac_bits)) {
    throw ProtocolError(
        "session setup: codec mismatch (peer k=" +
        std::to_string(peer.payload[1]) + ", f=" +
        std::to_string(peer.payload[2]) + ", local f=" +
        std::to_string(codec_.frac_bits) + ")");
  }
  prev_key_.key = {peer.payload[3], peer.payload[4]};
}

RepShare PartyEngine::add_public(RepShare x, ring_t c) const {
  if (id_ == 0) x.a += c;
  if (id_ == 2) x.b += c;
  return x;
}

RepShare PartyEngine::public_share(ring_t c) const {
  return add_public(RepShare{}, c);
}

BoolShare PartyEngine::bxor_public(BoolShare x, ring_t m) const {
  if (id_ == 0) x.a ^= m;
  if (id_ == 2) x.b ^= m;
  return x;
}

ring_t PartyEngine::zero_share_arith() {
  return next_key_.next(PrfDomain::ZeroShareArith) -
         prev_key_.next(PrfDomain::ZeroShareArith);
}

ring_t PartyEngine::zero_share_bool() {
  return next_key_.next(PrfDomain::ZeroShareBool) ^
         prev_key_.next(PrfDomain::ZeroShareBool);
}

std::vector<RepShare> PartyEngine::mul(std::span<const RepShare> x,
                                       std::span<const RepShare> y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("mul: operand size mismatch");
  }
  const std::uint64_t round = next_round();

  Frame out;
  out.round = round;
  out.payload.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); i++) {
    const ring_t cross = x[i].a * y[i].a + x[i].a * y[i].b + x[i].b * y[i].a;
    out.payload.push_back(cross + zero_share_arith());
  }
  std::vector<ring_t> own = out.payload;
  transport_.send(prev_party(id_), std::move(out));

  Frame in = transport_.recv(next_party(id_), MsgType::Data, round);
  if (in.payload.size() != x.size()) {
    throw ProtocolError("mul: peer sent wrong batch size");
  }
  std::vector<RepShare> result(x.size());
  for (std::size_t i = 0; i < x.size(); i++) {
    result[i] = {own[i], in.payload[i]};
  }
  return result;
}

std::vector<BoolShare> PartyEngine::band(std::span<const BoolShare> x,
                                         std::span<const BoolShare> y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("band: operand size mismatch");
  }
  const std::uint64_t round = next_round();

  Frame out;
  out.round = round;
  out.payload.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); i++) {
    const ring_t cross = (x[i].a & y[i].a) ^ (x[i].a & y[i].b) ^ (x[i].b & y[i].a);
    out.payload.push_back(cross ^ zero_share_bool());
  }
  std::vector<ring_t> own = out.payload;
  transport_.send(prev_party(id_), std::move(out));

  Frame in = transport_.recv(next_party(id_), MsgType::Data, round);
  if (in.payload.size() != x.size()) {
    throw ProtocolError("band: peer sent wrong batch size");
  }
  std::vector<BoolShare> result(x.size());
  for (std::size_t i = 0; i < x.size(); i++) {
    result[i] = {own[i], in.payload[i]};
  }
  return result;
}

std::vector<RepShare> PartyEngine::trunc(std::span<const RepShare> x) {
  const std::uint64_t round_d = next_round();
  const std::uint64_t round_y = next_round();
  const int f = codec_.frac_bits;
  std::vector<RepShare> result(x.size());

  if (id_ == 0) {
    // alpha = x0 + (x1 + x2 - s) = X - s; the mask range keeps the signed
    // view exact, so the local shift is off by at most one ulp in total.
    Frame d = transport_.recv(1, MsgType::Data, round_d);
    if (d.payload.size() != x.size()) {
      throw ProtocolError("trunc: peer sent wrong batch size");
    }
    Frame out;
    out.round = round_y;
    out.payload.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); i++) {
      const ring_t alpha = x[i].a + d.payload[i];
      const ring_t alpha_t = to_ring(to_signed(alpha) >> f);
      const ring_t rho = next_key_.next(PrfDomain::ReshareMask);
      const ring_t y0 = alpha_t - rho;
      out.payload.push_back(y0);
      result[i] = {y0, rho};
    }
    transport_.send(2, std::move(out));
  } else if (id_ == 1) {
    Frame out;
    out.round = round_d;
    out.payload.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); i++) {
      const ring_t raw = next_key_.next(PrfDomain::TruncMask);
      const std::int64_t s = to_signed(raw >> 1) - to_signed(kTwo62);
      out.payload.push_back(x[i].a + x[i].b - to_ring(s));
      const ring_t s_t = to_ring(s >> f);
      const ring_t rho = prev_key_.next(PrfDomain::ReshareMask);
      result[i] = {rho, s_t};
    }
    transport_.send(0, std::move(out));
  } else {
    std::vector<ring_t> s_t(x.size());
    for (std::size_t i = 0; i < x.size(); i++) {
      const ring_t raw = prev_key_.next(PrfDomain::TruncMask);
      const std::int64_t s = to_signed(raw >> 1) - to_signed(kTwo62);
      s_t[i] = to_ring(s >> f);
    }
    Frame y0 = transport_.recv(0, MsgType::Data, round_y);
    if (y0.payload.size() != x.size()) {
      throw ProtocolError("trunc: peer sent wrong batch size");
    }
    for (std::size_t i = 0; i < x.size(); i++) {
      result[i] = {s_t[i], y0.payload[i]};
    }
  }
  return result;
}

std::vector<ring_t> PartyEngine::open(std::span<const RepShare> x,
                                      OpenKind kind) {
  const std::uint64_t round = next_round();

  Frame to_next;
  to_next.type = MsgType::OpenBroadcast;
  to_next.round = round;
  Frame to_prev = to_next;
  for (const RepShare& s : x) {
    to_next.payload.push_back(s.a);
    to_prev.payload.push_back(s.b);
  }
  transport_.send(next_party(id_), std::move(to_next));
  transport_.send(prev_party(id_), std::move(to_prev));

  Frame from_prev = transport_.recv(prev_party(id_), MsgType::OpenBroadcast, round);
  Frame from_next = transport_.recv(next_party(id_), MsgType::OpenBroadcast, round);
  if (from_prev.payload.size() != x.size() ||
      from_next.payload.size() != x.size()) {
    throw ProtocolError("open: peer sent wrong batch size");
  }

  std::vector<ring_t> out(x.size());
  for (std::size_t i = 0; i < x.size(); i++) {
    if (from_prev.payload[i] != from_next.payload[i]) {
      throw ConsistencyError("open: received summands disagree");
    }
    out[i] = x[i].a + x[i].b + from_prev.payload[i];
  }
  open_log_.push_back({kind, x.size()});
  return out;
}

std::vector<RepShare> PartyEngine::input_shares(int owner,
                                                std::span<const ring_t> values,
                                                std::size_t count) {
  const std::uint64_t round = next_round();
  std::vector<RepShare> result(count);

  if (id_ == owner) {
    if (values.size() != count) {
      throw std::invalid_argument("input_shares: owner must supply all values");
    }
    std::array<Frame, 2> out;  // for owner+1 and owner+2
    for (Frame& f : out) {
      f.round = round;
      f.payload.resize(2 * count);
    }
    for (std::size_t i = 0; i < count; i++) {
      std::array<ring_t, 3> summand;
      summand[0] = rng_();
      summand[1] = rng_();
      summand[2] = values[i] - summand[0] - summand[1];
      for (int k = 0; k < 2; k++) {
        const int peer = (owner + 1 + k) % 3;
        out[k].payload[i] = summand[peer];
        out[k].payload[count + i] = summand[(peer + 1) % 3];
      }
      result[i] = {summand[owner], summand[(owner + 1) % 3]};
    }
    transport_.send((owner + 1) % 3, std::move(out[0]));
    transport_.send((owner + 2) % 3, std::move(out[1]));
  } else {
    Frame in = transport_.recv(owner, MsgType::Data, round);
    if (in.payload.size() != 2 * count) {
      throw ProtocolError("input_shares: owner sent wrong batch size");
    }
    for (std::size_t i = 0; i < count; i++) {
      result[i] = {in.payload[i], in.payload[count + i]};
    }
  }
  return result;
}

std::vector<RepShare> PartyEngine::random_bit_shares(std::size_t count) {
  std::array<std::vector<RepShare>, 3> contrib;
  for (int owner = 0; owner < 3; owner++) {
    std::vector<ring_t> bits;
    if (id_ == owner) {
      bits.reserve(count);
      for (std::size_t i = 0; i < count; i++) {
        bits.push_back(ring_t(joint_bits_->next_bit()));
      }
    }
    contrib[owner] = input_shares(owner, bits, count);
  }

  // b0 ^ b1 ^ b2 with x ^ y = x + y - 2xy; bit-valued throughout, so no
  // fixed-point rescaling is involved.
  auto fold = [this](const std::vector<RepShare>& u,
                     const std::vector<RepShare>& v) {
    std::vector<RepShare> prod = mul(u, v);
    std::vector<RepShare> out(u.size());
    for (std::size_t i = 0; i < u.size(); i++) {
      out[i] = sub(add(u[i], v[i]), mul_public(prod[i], 2));
    }
    return out;
  };
  return fold(fold(contrib[0], contrib[1]), contrib[2]);
}

std::array<BoolShare, 3> PartyEngine::summand_bits(RepShare x) const {
  std::array<BoolShare, 3> out{};
  out[id_].a = x.a;
  out[(id_ + 1) % 3].b = x.b;
  return out;
}

std::vector<RepShare> PartyEngine::bits_to_arith(
    std::span<const BoolShare> bits) {
  std::array<std::vector<RepShare>, 3> summand;
  for (auto& v : summand) v.resize(bits.size());
  for (std::size_t i = 0; i < bits.size(); i++) {
    summand[id_][i].a = bits[i].a & 1;
    summand[(id_ + 1) % 3][i].b = bits[i].b & 1;
  }
  auto fold = [this](const std::vector<RepShare>& u,
                     const std::vector<RepShare>& v) {
    std::vector<RepShare> prod = mul(u, v);
    std::vector<RepShare> out(u.size());
    for (std::size_t i = 0; i < u.size(); i++) {
      out[i] = sub(add(u[i], v[i]), mul_public(prod[i], 2));
    }
    return out;
  };
  return fold(fold(summand[0], summand[1]), summand[2]);
}

RepShare PartyEngine::mul1(RepShare x, RepShare y) {
  return mul(std::span<const RepShare>(&x, 1), std::span<const RepShare>(&y, 1))[0];
}

RepShare PartyEngine::trunc1(RepShare x) {
  return trunc(std::span<const RepShare>(&x, 1))[0];
}

ring_t PartyEngine::open1(RepShare x, OpenKind kind) {
  return open(std::span<const RepShare>(&x, 1), kind)[0];
}

}  // namespace mwem
