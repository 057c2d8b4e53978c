#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mwem/prf.hpp"
#include "mwem/ring.hpp"
#include "mwem/wire.hpp"

using namespace mwem;

TEST_CASE("encode fixed-point values") {
  FixedCodec codec;
  CHECK(codec.encode(0.0) == 0);
  CHECK(codec.encode(1.5) == 98304);
  CHECK(codec.encode(-0.25) == ring_t(0) - 16384);  // 2^64 - 16384
  CHECK_THROWS_AS(codec.encode(1e30), std::out_of_range);
  CHECK_THROWS_AS(codec.encode(std::exp2(47)), std::out_of_range);
}

TEST_CASE("decode fixed-point values") {
  FixedCodec codec;
  CHECK(codec.decode(0) == 0.0);
  CHECK(codec.decode(98304) == 1.5);
  CHECK(codec.decode(ring_t(0) - 16384) == -0.25);
}

TEST_CASE("encode/decode round trip stays within half an ulp") {
  FixedCodec codec;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-1e4, 1e4);
  for (int i = 0; i < 20000; i++) {
    const double x = dist(rng);
    CHECK(std::fabs(codec.decode(codec.encode(x)) - x) <=
          0.5 * codec.resolution());
  }
}

TEST_CASE("plain truncation rescales raw products") {
  FixedCodec codec;
  // Integer product: exact.
  CHECK(codec.trunc(codec.encode_raw_product(6.0)) == codec.encode(6.0));

  // Signed and fractional cases, against real multiplication then encode.
  CHECK(codec.trunc(codec.encode_raw_product(1.5 * 2.5)) == codec.encode(3.75));
  CHECK(codec.trunc(codec.encode_raw_product(-0.5 * 0.5)) ==
        codec.encode(-0.25));
}

TEST_CASE("product of representable values truncates within tolerance") {
  FixedCodec codec;
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::int64_t> dist(-(1 << 20), 1 << 20);
  for (int i = 0; i < 20000; i++) {
    const double x = codec.decode(to_ring(dist(rng)));
    const double y = codec.decode(to_ring(dist(rng)));
    const ring_t raw = codec.encode(x) * codec.encode(y);
    const double got = codec.decode(codec.trunc(raw));
    CHECK(std::fabs(got - x * y) <= std::exp2(1 - codec.frac_bits));
  }
}

TEST_CASE("ring operations form a commutative ring") {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 10000; i++) {
    const ring_t a = rng(), b = rng(), c = rng();
    CHECK((a + b) + c == a + (b + c));
    CHECK(a + b == b + a);
    CHECK(a * b == b * a);
    CHECK(a * (b + c) == a * b + a * c);
    CHECK(a + (ring_t(0) - a) == 0);
  }
}

TEST_CASE("pairwise PRF telescopes to a zero sharing") {
  std::mt19937_64 rng(17);
  std::array<PrfKey, 3> keys;
  for (auto& k : keys) k = {rng(), rng()};
  for (std::uint64_t ctr = 0; ctr < 10000; ctr++) {
    ring_t sum = 0;
    for (int p = 0; p < 3; p++) {
      sum += prf_eval(keys[p], 1, ctr) - prf_eval(keys[(p + 2) % 3], 1, ctr);
    }
    CHECK(sum == 0);
  }

  // Determinism and a mean/variance sanity check on the stream.
  CHECK(prf_eval(keys[0], 1, 42) == prf_eval(keys[0], 1, 42));
  double mean = 0;
  const int n = 20000;
  for (int i = 0; i < n; i++) {
    mean += double(prf_eval(keys[0], 1, i)) / n;
  }
  const double expected = std::exp2(63);
  const double sigma = std::exp2(64) / std::sqrt(12.0) / std::sqrt(double(n));
  CHECK(std::fabs(mean - expected) < 5 * sigma);
}

TEST_CASE("frame encoding is bit-exact") {
  Frame f;
  f.type = MsgType::OpenBroadcast;
  f.round = 0x0102030405060708ULL;
  f.sender = 2;
  f.payload = {0x1122334455667788ULL, 1};

  const auto bytes = encode_frame(f);
  REQUIRE(bytes.size() == 14 + 16);
  // 4-byte big-endian payload length.
  CHECK(bytes[0] == 0x00);
  CHECK(bytes[1] == 0x00);
  CHECK(bytes[2] == 0x00);
  CHECK(bytes[3] == 0x10);
  // Message type, big-endian round counter, sender id.
  CHECK(bytes[4] == 0x03);
  CHECK(bytes[5] == 0x01);
  CHECK(bytes[12] == 0x08);
  CHECK(bytes[13] == 0x02);
  // Little-endian ring elements.
  CHECK(bytes[14] == 0x88);
  CHECK(bytes[21] == 0x11);
  CHECK(bytes[22] == 0x01);
  CHECK(bytes[29] == 0x00);

  std::size_t consumed = 0;
  const auto back = decode_frame(bytes.data(), bytes.size(), &consumed);
  REQUIRE(back.has_value());
  CHECK(consumed == bytes.size());
  CHECK(back->type == f.type);
  CHECK(back->round == f.round);
  CHECK(back->sender == f.sender);
  CHECK(back->payload == f.payload);

  // Partial buffers parse to nothing; garbage headers throw.
  CHECK(!decode_frame(bytes.data(), 10, nullptr).has_value());
  auto bad = bytes;
  bad[4] = 0x7f;
  CHECK_THROWS(decode_frame(bad.data(), bad.size(), nullptr));
}
