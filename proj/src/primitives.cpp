#include "mwem/primitives.hpp"

#include <cmath>
#include <stdexcept>

namespace mwem {

namespace {

// Bit-sliced carry-save reduction of the three summands followed by a
// Kogge-Stone adder, all over XOR-shared 64-bit words. Each input value
// occupies one word lane, so a batch of n values costs a constant number
// of AND phases moving O(n) words each.
std::vector<BoolShare> mod_sum_bits(PartyEngine& e,
                                    std::span<const RepShare> d) {
  const std::size_t n = d.size();
  std::vector<BoolShare> s(n), lhs(2 * n), rhs(2 * n);
  for (std::size_t i = 0; i < n; i++) {
    const auto b = e.summand_bits(d[i]);
    s[i] = PartyEngine::bxor(PartyEngine::bxor(b[0], b[1]), b[2]);
    // carry = (b0 & b1) ^ ((b0 ^ b1) & b2)
    lhs[i] = b[0];
    rhs[i] = b[1];
    lhs[n + i] = PartyEngine::bxor(b[0], b[1]);
    rhs[n + i] = b[2];
  }
  const auto carry_parts = e.band(lhs, rhs);

  // Kogge-Stone over (s, c): generate/propagate, then log-depth combine.
  std::vector<BoolShare> p0(n), g(n), p(n);
  std::vector<BoolShare> c(n);
  for (std::size_t i = 0; i < n; i++) {
    c[i] = PartyEngine::bshl(
        PartyEngine::bxor(carry_parts[i], carry_parts[n + i]), 1);
    p0[i] = PartyEngine::bxor(s[i], c[i]);
  }
  g = e.band(s, c);
  p = p0;
  for (int k = 1; k < 64; k <<= 1) {
    std::vector<BoolShare> a(2 * n), b(2 * n);
    for (std::size_t i = 0; i < n; i++) {
      a[i] = p[i];
      b[i] = PartyEngine::bshl(g[i], k);
      a[n + i] = p[i];
      b[n + i] = PartyEngine::bshl(p[i], k);
    }
    auto out = e.band(a, b);
    for (std::size_t i = 0; i < n; i++) {
      g[i] = PartyEngine::bxor(g[i], out[i]);
      p[i] = out[n + i];
    }
  }

  std::vector<BoolShare> sum(n);
  for (std::size_t i = 0; i < n; i++) {
    sum[i] = PartyEngine::bxor(p0[i], PartyEngine::bshl(g[i], 1));
  }
  return sum;
}

std::vector<RepShare> sign_bit(PartyEngine& e, std::span<const RepShare> d) {
  auto sum = mod_sum_bits(e, d);
  for (auto& w : sum) w = PartyEngine::bshr(w, 63);
  return e.bits_to_arith(sum);
}

}  // namespace

std::vector<RepShare> less_than(PartyEngine& e, std::span<const RepShare> x,
                                std::span<const RepShare> y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("less_than: size mismatch");
  }
  std::vector<RepShare> d(x.size());
  for (std::size_t i = 0; i < x.size(); i++) {
    d[i] = PartyEngine::sub(x[i], y[i]);
  }
  return sign_bit(e, d);
}

std::vector<RepShare> less_than_public(PartyEngine& e,
                                       std::span<const RepShare> x,
                                       std::span<const ring_t> y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("less_than_public: size mismatch");
  }
  std::vector<RepShare> d(x.size());
  for (std::size_t i = 0; i < x.size(); i++) {
    d[i] = e.add_public(x[i], ring_t(0) - y[i]);
  }
  return sign_bit(e, d);
}

std::vector<RepShare> greater_than_public(PartyEngine& e,
                                          std::span<const RepShare> x,
                                          std::span<const ring_t> y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("greater_than_public: size mismatch");
  }
  std::vector<RepShare> d(x.size());
  for (std::size_t i = 0; i < x.size(); i++) {
    d[i] = PartyEngine::sub(e.public_share(y[i]), x[i]);
  }
  return sign_bit(e, d);
}

namespace {

// 1 iff the shared difference is exactly 0: AND-fold the complemented
// sum bits down to the LSB.
std::vector<RepShare> is_zero(PartyEngine& e, std::span<const RepShare> d) {
  const std::size_t n = d.size();
  auto sum = mod_sum_bits(e, d);
  for (auto& w : sum) w = e.bnot(w);
  for (int k = 32; k >= 1; k >>= 1) {
    std::vector<BoolShare> a(n), b(n);
    for (std::size_t i = 0; i < n; i++) {
      a[i] = sum[i];
      b[i] = PartyEngine::bshr(sum[i], k);
    }
    sum = e.band(a, b);
  }
  return e.bits_to_arith(sum);
}

}  // namespace

std::vector<RepShare> equal_public(PartyEngine& e,
                                   std::span<const RepShare> x,
                                   std::span<const ring_t> y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("equal_public: size mismatch");
  }
  std::vector<RepShare> d(x.size());
  for (std::size_t i = 0; i < x.size(); i++) {
    d[i] = e.add_public(x[i], ring_t(0) - y[i]);
  }
  return is_zero(e, d);
}

std::vector<RepShare> equal_shares(PartyEngine& e,
                                   std::span<const RepShare> x,
                                   std::span<const RepShare> y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("equal_shares: size mismatch");
  }
  std::vector<RepShare> d(x.size());
  for (std::size_t i = 0; i < x.size(); i++) {
    d[i] = PartyEngine::sub(x[i], y[i]);
  }
  return is_zero(e, d);
}

std::vector<RepShare> oblivious_select(PartyEngine& e,
                                       std::span<const RepShare> c,
                                       std::span<const RepShare> a,
                                       std::span<const RepShare> b) {
  if (c.size() != a.size() || a.size() != b.size()) {
    throw std::invalid_argument("oblivious_select: size mismatch");
  }
  std::vector<RepShare> diff(a.size());
  for (std::size_t i = 0; i < a.size(); i++) {
    diff[i] = PartyEngine::sub(a[i], b[i]);
  }
  auto scaled = e.mul(c, diff);
  for (std::size_t i = 0; i < a.size(); i++) {
    scaled[i] = PartyEngine::add(b[i], scaled[i]);
  }
  return scaled;
}

RepShare maximum(PartyEngine& e, std::span<const RepShare> v) {
  if (v.empty()) throw std::invalid_argument("maximum: empty vector");
  std::vector<RepShare> cur(v.begin(), v.end());
  while (cur.size() > 1) {
    const std::size_t half = cur.size() / 2;
    std::vector<RepShare> lo(cur.begin(), cur.begin() + half);
    std::vector<RepShare> hi(cur.begin() + half, cur.begin() + 2 * half);
    auto is_less = less_than(e, lo, hi);
    auto winner = oblivious_select(e, is_less, hi, lo);
    if (cur.size() % 2 == 1) winner.push_back(cur.back());
    cur = std::move(winner);
  }
  return cur[0];
}

std::vector<RepShare> exp_nonpositive(PartyEngine& e,
                                      std::span<const RepShare> x) {
  const FixedCodec& codec = e.codec();
  const int f = codec.frac_bits;
  const std::size_t n = x.size();

  // e^x = 2^-u with u = -x*log2(e) >= 0, split as u = n_int + phi.
  // The integer part is bounded via an oblivious clamp at 24, which is
  // already below resolution for any f <= 24.
  std::vector<RepShare> u(n);
  {
    std::vector<RepShare> raw(n);
    const ring_t neg_log2e = ring_t(0) - codec.encode(std::log2(std::exp(1.0)));
    for (std::size_t i = 0; i < n; i++) {
      raw[i] = PartyEngine::mul_public(x[i], neg_log2e);
    }
    u = e.trunc(raw);
  }

  constexpr int kMaxPow = 24;
  {
    const std::vector<ring_t> cap(n, codec.encode(double(kMaxPow)));
    auto below = less_than_public(e, u, cap);
    std::vector<RepShare> capped(n);
    for (std::size_t i = 0; i < n; i++) capped[i] = e.public_share(cap[i]);
    u = oblivious_select(e, below, u, capped);
  }

  // Threshold bits g_j = (u >= j), j = 1..24, batched in one comparison.
  std::vector<RepShare> urep(kMaxPow * n);
  std::vector<ring_t> thresholds(kMaxPow * n);
  for (int j = 1; j <= kMaxPow; j++) {
    for (std::size_t i = 0; i < n; i++) {
      urep[(j - 1) * n + i] = u[i];
      thresholds[(j - 1) * n + i] = codec.encode(double(j));
    }
  }
  auto lt = less_than_public(e, urep, thresholds);  // u < j

  // 2^-n_int = 1 - sum_j g_j * 2^-j (telescoped; exact ring constants),
  // phi = u - n_int in [0, 1).
  std::vector<RepShare> pow_int(n), phi = u;
  for (std::size_t i = 0; i < n; i++) {
    pow_int[i] = e.public_share(codec.encode(1.0));
  }
  for (int j = 1; j <= kMaxPow; j++) {
    const ring_t weight = j <= f ? ring_t(1) << (f - j) : 0;
    for (std::size_t i = 0; i < n; i++) {
      RepShare ge = PartyEngine::sub(e.public_share(1), lt[(j - 1) * n + i]);
      pow_int[i] = PartyEngine::sub(pow_int[i],
                                    PartyEngine::mul_public(ge, weight));
      phi[i] = PartyEngine::sub(phi[i],
                                PartyEngine::mul_public(ge, ring_t(1) << f));
    }
  }

  // 2^-phi on [0, 1), degree-5 minimax fit, Horner with rescaling steps.
  static const double kExpPoly[6] = {
      0.99999987851312089,    -0.69314202914204337,  0.24017432594448981,
      -0.055291340610172088,  0.0092062398231346557, -0.00094718971167660965};
  std::vector<RepShare> acc(n);
  for (std::size_t i = 0; i < n; i++) {
    acc[i] = e.public_share(codec.encode(kExpPoly[5]));
  }
  for (int deg = 4; deg >= 0; deg--) {
    acc = e.trunc(e.mul(acc, phi));
    const ring_t coef = codec.encode(kExpPoly[deg]);
    for (std::size_t i = 0; i < n; i++) {
      acc[i] = e.add_public(acc[i], coef);
    }
  }
  return e.trunc(e.mul(pow_int, acc));
}

std::vector<RepShare> log_unit_interval(PartyEngine& e,
                                        std::span<const RepShare> x) {
  const FixedCodec& codec = e.codec();
  const int f = codec.frac_bits;
  const std::size_t n = x.size();

  // Normalize x = m * 2^-p with m in (1/2, 1] by locating the highest
  // set bit through threshold comparisons g_j = (x > 2^-j), j = 1..f.
  std::vector<RepShare> xrep(std::size_t(f) * n);
  std::vector<ring_t> thresholds(std::size_t(f) * n);
  for (int j = 1; j <= f; j++) {
    for (std::size_t i = 0; i < n; i++) {
      xrep[(j - 1) * n + i] = x[i];
      thresholds[(j - 1) * n + i] = ring_t(1) << (f - j);
    }
  }
  auto gt = greater_than_public(e, xrep, thresholds);

  // p = f - sum_j g_j ; 2^p = 2^f - sum_j g_j 2^(j-1) ; both exact.
  std::vector<RepShare> pow_p(n), p_count(n);
  for (std::size_t i = 0; i < n; i++) {
    pow_p[i] = e.public_share(ring_t(1) << f);
    p_count[i] = e.public_share(ring_t(f));
  }
  for (int j = 1; j <= f; j++) {
    for (std::size_t i = 0; i < n; i++) {
      const RepShare& g = gt[(j - 1) * n + i];
      pow_p[i] = PartyEngine::sub(pow_p[i],
                                  PartyEngine::mul_public(g, ring_t(1) << (j - 1)));
      p_count[i] = PartyEngine::sub(p_count[i], g);
    }
  }

  // m = x * 2^p is integer-scaled by construction: no rescaling needed.
  auto m = e.mul(x, pow_p);

  // ln(m) over m in (1/2, 1] via a degree-6 fit around 0.75.
  static const double kLnPoly[7] = {
      -0.28768194630873212, 1.3333584108714587,  -0.88896066149903064,
      0.78657645011245292,  -0.78393411020032089, 0.96328400037469009,
      -1.1013159117319524};
  std::vector<RepShare> w(n);
  const ring_t enc_075 = codec.encode(0.75);
  for (std::size_t i = 0; i < n; i++) {
    w[i] = e.add_public(m[i], ring_t(0) - enc_075);
  }
  std::vector<RepShare> acc(n);
  for (std::size_t i = 0; i < n; i++) {
    acc[i] = e.public_share(codec.encode(kLnPoly[6]));
  }
  for (int deg = 5; deg >= 0; deg--) {
    acc = e.trunc(e.mul(acc, w));
    const ring_t coef = codec.encode(kLnPoly[deg]);
    for (std::size_t i = 0; i < n; i++) {
      acc[i] = e.add_public(acc[i], coef);
    }
  }

  // ln(x) = ln(m) - p ln 2.
  const ring_t enc_ln2 = codec.encode(std::log(2.0));
  for (std::size_t i = 0; i < n; i++) {
    acc[i] = PartyEngine::sub(acc[i],
                              PartyEngine::mul_public(p_count[i], enc_ln2));
  }
  return acc;
}

RepShare unit_uniform(PartyEngine& e) { return unit_uniform_batch(e, 1)[0]; }

std::vector<RepShare> unit_uniform_batch(PartyEngine& e, std::size_t count) {
  const int f = e.codec().frac_bits;
  auto bits = e.random_bit_shares(std::size_t(f) * count);
  std::vector<RepShare> out(count);
  for (std::size_t i = 0; i < count; i++) {
    RepShare acc{};
    for (int j = 1; j <= f; j++) {
      acc = PartyEngine::add(
          acc, PartyEngine::mul_public(bits[i * std::size_t(f) + (j - 1)],
                                       ring_t(1) << (f - j)));
    }
    out[i] = acc;
  }
  return out;
}

RepShare random_bit(PartyEngine& e) { return e.random_bit_shares(1)[0]; }

RepShare less_than1(PartyEngine& e, RepShare x, RepShare y) {
  return less_than(e, std::span<const RepShare>(&x, 1),
                   std::span<const RepShare>(&y, 1))[0];
}

RepShare select1(PartyEngine& e, RepShare c, RepShare a, RepShare b) {
  return oblivious_select(e, std::span<const RepShare>(&c, 1),
                          std::span<const RepShare>(&a, 1),
                          std::span<const RepShare>(&b, 1))[0];
}

}  // namespace mwem
