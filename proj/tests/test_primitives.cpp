#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "mwem/primitives.hpp"
#include "mwem/sim.hpp"

using namespace mwem;

namespace {

std::array<std::vector<RepShare>, 3> deal_vector(const std::vector<ring_t>& xs,
                                                 std::mt19937_64& rng) {
  std::array<std::vector<RepShare>, 3> out;
  for (ring_t x : xs) {
    const auto s = make_shares(x, rng);
    for (int p = 0; p < 3; p++) out[p].push_back(s[p]);
  }
  return out;
}

// Runs the protocol on shared inputs and returns the opened outputs as
// seen by party 0 (all parties' openings are cross-checked by open()).
template <class Fn>
std::vector<ring_t> eval_shared(const std::vector<ring_t>& xs, Fn fn,
                                std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  const auto shares = deal_vector(xs, rng);
  SimOptions opts;
  opts.seed = seed;
  auto res = sim_parties(opts, [&](PartyEngine& e) {
    return e.open(fn(e, shares[e.id()]), OpenKind::Diagnostic);
  });
  return res[0];
}

}  // namespace

TEST_CASE("less_than on integers and ties") {
  std::mt19937_64 rng(1);
  auto lt = [&](std::int64_t a, std::int64_t b) {
    const auto xs = deal_vector({to_ring(a)}, rng);
    const auto ys = deal_vector({to_ring(b)}, rng);
    auto res = sim_parties(SimOptions{}, [&](PartyEngine& e) {
      return e.open1(less_than1(e, xs[e.id()][0], ys[e.id()][0]),
                     OpenKind::Diagnostic);
    });
    return res[0];
  };
  CHECK(lt(3, 5) == 1);
  CHECK(lt(5, 3) == 0);
  CHECK(lt(4, 4) == 0);
  CHECK(lt(-10, 3) == 1);
  CHECK(lt(3, -10) == 0);
  CHECK(lt(-5, -4) == 1);
}

TEST_CASE("comparison trichotomy on random signed pairs") {
  std::mt19937_64 rng(2);
  const int n = 2000;
  std::vector<ring_t> xs(n), ys(n);
  std::uniform_int_distribution<std::int64_t> dist(-(std::int64_t(1) << 61),
                                                   std::int64_t(1) << 61);
  for (int i = 0; i < n; i++) {
    xs[i] = to_ring(dist(rng));
    ys[i] = i % 7 == 0 ? xs[i] : to_ring(dist(rng));
  }
  const auto xsh = deal_vector(xs, rng);
  const auto ysh = deal_vector(ys, rng);

  auto res = sim_parties(SimOptions{}, [&](PartyEngine& e) {
    auto lt = e.open(less_than(e, xsh[e.id()], ysh[e.id()]), OpenKind::Diagnostic);
    auto gt = e.open(less_than(e, ysh[e.id()], xsh[e.id()]), OpenKind::Diagnostic);
    auto eq = e.open(equal_shares(e, xsh[e.id()], ysh[e.id()]), OpenKind::Diagnostic);
    return std::array<std::vector<ring_t>, 3>{lt, gt, eq};
  });
  for (int i = 0; i < n; i++) {
    const ring_t lt = res[0][0][i], gt = res[0][1][i], eq = res[0][2][i];
    CHECK(lt + gt + eq == 1);
    CHECK(lt == ring_t(to_signed(xs[i]) < to_signed(ys[i]) ? 1 : 0));
    CHECK(eq == ring_t(xs[i] == ys[i] ? 1 : 0));
  }
}

TEST_CASE("comparisons are invariant under positive public scaling") {
  std::mt19937_64 rng(3);
  const int n = 500;
  std::vector<ring_t> xs(n), ys(n);
  std::uniform_int_distribution<std::int64_t> dist(-(1 << 30), 1 << 30);
  for (int i = 0; i < n; i++) {
    xs[i] = to_ring(dist(rng));
    ys[i] = to_ring(dist(rng));
  }
  const auto xsh = deal_vector(xs, rng);
  const auto ysh = deal_vector(ys, rng);

  auto res = sim_parties(SimOptions{}, [&](PartyEngine& e) {
    std::vector<RepShare> sx(n), sy(n);
    for (int i = 0; i < n; i++) {
      sx[i] = PartyEngine::mul_public(xsh[e.id()][i], 5);
      sy[i] = PartyEngine::mul_public(ysh[e.id()][i], 5);
    }
    auto base = e.open(less_than(e, xsh[e.id()], ysh[e.id()]), OpenKind::Diagnostic);
    auto scaled = e.open(less_than(e, sx, sy), OpenKind::Diagnostic);
    return std::pair{base, scaled};
  });
  CHECK(res[0].first == res[0].second);
}

TEST_CASE("equality against public constants") {
  FixedCodec codec;
  std::mt19937_64 rng(4);
  const auto zero = deal_vector({0}, rng);
  const auto seven = deal_vector({7}, rng);
  auto res = sim_parties(SimOptions{}, [&](PartyEngine& e) {
    std::vector<ring_t> z{0}, s7{7}, s8{8};
    std::array<ring_t, 3> out{};
    out[0] = e.open(equal_public(e, zero[e.id()], z), OpenKind::Diagnostic)[0];
    out[1] = e.open(equal_public(e, seven[e.id()], s7), OpenKind::Diagnostic)[0];
    out[2] = e.open(equal_public(e, seven[e.id()], s8), OpenKind::Diagnostic)[0];
    return out;
  });
  CHECK(res[0][0] == 1);
  CHECK(res[0][1] == 1);
  CHECK(res[0][2] == 0);
}

TEST_CASE("oblivious select routes on the bit") {
  std::mt19937_64 rng(5);
  const auto one = deal_vector({1}, rng);
  const auto zero = deal_vector({0}, rng);
  const auto nine = deal_vector({9}, rng);
  const auto four = deal_vector({4}, rng);
  auto res = sim_parties(SimOptions{}, [&](PartyEngine& e) {
    std::array<ring_t, 3> out{};
    out[0] = e.open1(select1(e, one[e.id()][0], nine[e.id()][0], four[e.id()][0]),
                     OpenKind::Diagnostic);
    out[1] = e.open1(select1(e, zero[e.id()][0], nine[e.id()][0], four[e.id()][0]),
                     OpenKind::Diagnostic);
    out[2] = e.open1(select1(e, one[e.id()][0], nine[e.id()][0], nine[e.id()][0]),
                     OpenKind::Diagnostic);
    return out;
  });
  CHECK(res[0][0] == 9);
  CHECK(res[0][1] == 4);
  CHECK(res[0][2] == 9);
}

TEST_CASE("maximum of shared vectors") {
  FixedCodec codec;
  auto max_of = [&](const std::vector<ring_t>& xs, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const auto sh = deal_vector(xs, rng);
    auto res = sim_parties(SimOptions{}, [&](PartyEngine& e) {
      return e.open1(maximum(e, sh[e.id()]), OpenKind::Diagnostic);
    });
    return res[0];
  };

  CHECK(max_of({1, 7, 3}, 6) == 7);
  CHECK(max_of({42}, 7) == 42);
  CHECK(max_of({codec.encode(-2.5), codec.encode(-0.5), codec.encode(-1.0)}, 8) ==
        codec.encode(-0.5));

  // Random vectors against the plaintext max, exact.
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<std::int64_t> dist(-(1 << 30), 1 << 30);
  for (int len : {2, 5, 17, 64}) {
    std::vector<ring_t> xs(len);
    std::int64_t expect = INT64_MIN;
    for (auto& v : xs) {
      const std::int64_t s = dist(rng);
      v = to_ring(s);
      expect = std::max(expect, s);
    }
    CHECK(max_of(xs, 100 + len) == to_ring(expect));
  }

  CHECK_THROWS_AS(
      sim_parties(SimOptions{},
                  [&](PartyEngine& e) {
                    std::vector<RepShare> empty;
                    return maximum(e, empty);
                  }),
      std::invalid_argument);
}

TEST_CASE("secure exponential of non-positive inputs") {
  FixedCodec codec;
  const double tol = std::exp2(-10);

  std::vector<double> points = {0.0, -1.0, -0.5, -3.25, -10.0, -15.9};
  std::vector<ring_t> enc;
  for (double x : points) enc.push_back(codec.encode(x));
  auto opened = eval_shared(enc, [](PartyEngine& e, const std::vector<RepShare>& s) {
    return exp_nonpositive(e, s);
  });
  for (std::size_t i = 0; i < points.size(); i++) {
    CHECK(std::fabs(codec.decode(opened[i]) - std::exp(points[i])) <= tol);
  }

  // Clamp region: anything at or below -17ish is 0 at f=16 resolution.
  auto clamped = eval_shared({codec.encode(-20.0), codec.encode(-100.0)},
                             [](PartyEngine& e, const std::vector<RepShare>& s) {
                               return exp_nonpositive(e, s);
                             });
  CHECK(std::fabs(codec.decode(clamped[0])) <= tol);
  CHECK(std::fabs(codec.decode(clamped[1])) <= tol);

  // Dense grid: accuracy plus near-monotonicity.
  const int n = 2000;
  std::vector<ring_t> grid(n);
  std::vector<double> xs(n);
  for (int i = 0; i < n; i++) {
    xs[i] = -16.0 * double(n - 1 - i) / double(n - 1);
    grid[i] = codec.encode(xs[i]);
  }
  auto vals = eval_shared(grid, [](PartyEngine& e, const std::vector<RepShare>& s) {
    return exp_nonpositive(e, s);
  });
  for (int i = 0; i < n; i++) {
    CHECK(std::fabs(codec.decode(vals[i]) - std::exp(xs[i])) <= tol);
    if (i > 0 && xs[i] - xs[i - 1] >= std::exp2(-6)) {
      CHECK(codec.decode(vals[i - 1]) <= codec.decode(vals[i]) + std::exp2(-9));
    }
  }
}

TEST_CASE("secure logarithm on the unit interval") {
  FixedCodec codec;
  const double tol = std::exp2(-10);

  auto opened = eval_shared(
      {codec.encode(1.0), codec.encode(0.5), ring_t(1)},
      [](PartyEngine& e, const std::vector<RepShare>& s) {
        return log_unit_interval(e, s);
      });
  CHECK(std::fabs(codec.decode(opened[0]) - 0.0) <= tol);
  CHECK(std::fabs(codec.decode(opened[1]) + 0.69314718) <= tol);
  CHECK(std::fabs(codec.decode(opened[2]) + 11.0903549) <= tol);

  // Grid over [2^-16, 1].
  const int n = 1000;
  std::vector<ring_t> grid(n);
  std::vector<double> xs(n);
  for (int i = 0; i < n; i++) {
    grid[i] = ring_t(1) + ring_t(std::llround(double(i) / (n - 1) * 65535.0));
    xs[i] = codec.decode(grid[i]);
  }
  auto vals = eval_shared(grid, [](PartyEngine& e, const std::vector<RepShare>& s) {
    return log_unit_interval(e, s);
  });
  for (int i = 0; i < n; i++) {
    CHECK(std::fabs(codec.decode(vals[i]) - std::log(xs[i])) <= tol);
  }
}

TEST_CASE("joint uniform draws have the right moments and KS statistic") {
  FixedCodec codec;
  const int n = 10000;
  SimOptions opts;
  opts.seed = 11;
  auto res = sim_parties(opts, [&](PartyEngine& e) {
    std::vector<RepShare> draws;
    draws.reserve(n);
    for (int i = 0; i < n; i++) draws.push_back(unit_uniform(e));
    return e.open(draws, OpenKind::Diagnostic);
  });

  std::vector<double> vals;
  double mean = 0;
  for (ring_t v : res[0]) {
    const double x = codec.decode(v);
    CHECK(x >= 0.0);
    CHECK(x <= 1.0 - codec.resolution());
    vals.push_back(x);
    mean += x / n;
  }
  double var = 0;
  for (double x : vals) var += (x - mean) * (x - mean) / n;
  CHECK(std::fabs(mean - 0.5) < 0.01);
  CHECK(std::fabs(var - 1.0 / 12.0) < 0.005);

  std::sort(vals.begin(), vals.end());
  double ks = 0;
  for (int i = 0; i < n; i++) {
    ks = std::max(ks, std::fabs(double(i + 1) / n - vals[i]));
    ks = std::max(ks, std::fabs(vals[i] - double(i) / n));
  }
  CHECK(ks < 0.02);
}

TEST_CASE("joint random bits are bits and roughly balanced") {
  SimOptions opts;
  opts.seed = 12;
  const int n = 10000;
  auto res = sim_parties(opts, [&](PartyEngine& e) {
    std::vector<RepShare> bits;
    bits.reserve(n);
    for (int i = 0; i < n; i++) bits.push_back(random_bit(e));
    return e.open(bits, OpenKind::Diagnostic);
  });
  int ones = 0;
  for (ring_t b : res[0]) {
    CHECK((b == 0 || b == 1));
    ones += int(b);
  }
  CHECK(double(ones) / n >= 0.48);
  CHECK(double(ones) / n <= 0.52);
}
