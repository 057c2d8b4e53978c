#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include "mwem/dp.hpp"
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

}  // namespace

TEST_CASE("privacy budget validation and derived parameters") {
  PrivacyBudget ok{1.0, 1};
  ok.validate();
  CHECK(ok.eps_prime() == doctest::Approx(0.5));
  CHECK(ok.laplace_scale() == doctest::Approx(2.0));

  CHECK_THROWS_AS((PrivacyBudget{0.0, 1}).validate(), std::invalid_argument);
  CHECK_THROWS_AS((PrivacyBudget{-1.0, 5}).validate(), std::invalid_argument);
  CHECK_THROWS_AS((PrivacyBudget{1.0, 0}).validate(), std::invalid_argument);
}

TEST_CASE("plain exponential mechanism frequencies") {
  PlainJointRandom rnd(101);

  // Equal scores: uniform over the four indices.
  {
    std::vector<double> scores(4, 1.0);
    std::array<int, 4> hits{};
    const int trials = 50000;
    for (int i = 0; i < trials; i++) {
      hits[em_select_plain(scores, 1.0, rnd) - 1]++;
    }
    for (int h : hits) {
      CHECK(std::fabs(double(h) / trials - 0.25) < 0.02);
    }
  }

  // Single query: always selected.
  {
    std::vector<double> one(1, 3.0);
    for (int i = 0; i < 100; i++) {
      CHECK(em_select_plain(one, 0.7, rnd) == 1);
    }
  }

  // Weights [1, 3] from scores [0, ln 3] at eps' = 2.
  {
    std::vector<double> scores = {0.0, std::log(3.0)};
    std::array<int, 2> hits{};
    const int trials = 50000;
    for (int i = 0; i < trials; i++) {
      hits[em_select_plain(scores, 2.0, rnd) - 1]++;
    }
    CHECK(std::fabs(double(hits[0]) / trials - 0.25) < 0.02);
    CHECK(std::fabs(double(hits[1]) / trials - 0.75) < 0.02);
  }

  std::vector<double> empty;
  CHECK_THROWS_AS(em_select_plain(empty, 1.0, rnd), std::invalid_argument);
}

TEST_CASE("plain laplace moments") {
  PlainJointRandom rnd(102);
  CHECK(laplace_plain(12.5, 0.0, rnd) == 12.5);

  const int trials = 50000;
  const double b = 2.0;
  double mean = 0;
  std::vector<double> xs(trials);
  for (int i = 0; i < trials; i++) {
    xs[i] = laplace_plain(100.0, b, rnd);
    mean += xs[i] / trials;
  }
  double var = 0;
  for (double x : xs) var += (x - mean) * (x - mean) / trials;
  CHECK(std::fabs(mean - 100.0) < 0.05);
  CHECK(var == doctest::Approx(2 * b * b).epsilon(0.10));

  CHECK_THROWS_AS(laplace_plain(0.0, -1.0, rnd), std::invalid_argument);
}

TEST_CASE("secure selection reproduces the counting trace") {
  FixedCodec codec;
  std::mt19937_64 rng(7);

  // Non-decreasing cumulative sums 1..10 with the threshold forced to
  // 6.5: the per-index strict comparisons come out 0 six times then 1
  // four times, the count is 4, and the selected index is 10 - 3 = 7.
  std::vector<ring_t> cum_enc;
  for (int i = 1; i <= 10; i++) cum_enc.push_back(codec.encode(double(i)));
  const auto cum_shares = deal_vector(cum_enc, rng);
  const auto t_shares = make_shares(codec.encode(6.5), rng);

  auto res = sim_parties(SimOptions{}, [&](PartyEngine& e) {
    std::vector<RepShare> trep(cum_enc.size(), t_shares[e.id()]);
    auto bits = e.open(less_than(e, trep, cum_shares[e.id()]),
                       OpenKind::Diagnostic);
    auto k = em_sample_stage(e, cum_shares[e.id()], t_shares[e.id()]);
    return std::pair{bits, k};
  });
  const std::vector<ring_t> expect_bits = {0, 0, 0, 0, 0, 0, 1, 1, 1, 1};
  CHECK(res[0].first == expect_bits);
  CHECK(res[0].second == 7);

  // Threshold at/above every cumulative sum: the edge path returns N.
  const auto t_high = make_shares(codec.encode(1000.0), rng);
  auto edge = sim_parties(SimOptions{}, [&](PartyEngine& e) {
    return em_sample_stage(e, cum_shares[e.id()], t_high[e.id()]);
  });
  CHECK(edge[0] == 10);
}

TEST_CASE("secure selection matches the plaintext mechanism's distribution") {
  FixedCodec codec;
  std::mt19937_64 rng(8);

  // Scores [0, ln3, 0, 0] at eps' = 2: weights [1, 3, 1, 1].
  const std::vector<double> scores = {0.0, std::log(3.0), 0.0, 0.0};
  const std::vector<double> expect = {1.0 / 6, 0.5, 1.0 / 6, 1.0 / 6};
  std::vector<ring_t> enc;
  for (double s : scores) enc.push_back(codec.encode(s));
  const auto shares = deal_vector(enc, rng);
  const std::vector<double> approx(scores.size(), 0.0);

  const int trials = 20000;
  SimOptions opts;
  opts.seed = 9;
  auto hits = sim_parties(opts, [&](PartyEngine& e) {
    std::array<int, 4> h{};
    for (int chunk = 0; chunk < 10; chunk++) {
      for (std::size_t k :
           em_select_mpc_batch(e, shares[e.id()], approx, 2.0, trials / 10)) {
        h[k - 1]++;
      }
    }
    return h;
  });
  for (int i = 0; i < 4; i++) {
    CHECK(std::fabs(double(hits[0][i]) / trials - expect[i]) < 0.02);
  }
}

TEST_CASE("secure selection opens nothing but the index") {
  FixedCodec codec;
  std::mt19937_64 rng(10);
  std::vector<ring_t> enc = {codec.encode(5.0), codec.encode(1.0),
                             codec.encode(3.0)};
  const auto shares = deal_vector(enc, rng);
  const std::vector<double> approx = {0.0, 0.0, 0.0};

  sim_parties(SimOptions{}, [&](PartyEngine& e) {
    const std::size_t k = em_select_mpc(e, shares[e.id()], approx, 0.5);
    CHECK(k >= 1);
    CHECK(k <= 3);
    REQUIRE(e.open_log().size() == 1);
    CHECK(e.open_log()[0].kind == OpenKind::QueryIndex);
    CHECK(e.open_log()[0].count == 1);
    return 0;
  });
}

TEST_CASE("secure measurement adds sign-symmetric truncated noise") {
  FixedCodec codec;
  std::mt19937_64 rng(11);
  const auto q = make_shares(codec.encode(100.0), rng);

  // b = 0: measurement equals the answer up to fixed-point slack.
  auto exact = sim_parties(SimOptions{}, [&](PartyEngine& e) {
    return laplace_measure_mpc(e, q[e.id()], 0.0);
  });
  CHECK(std::fabs(exact[0] - 100.0) <= std::exp2(1 - codec.frac_bits));

  // Noise magnitude never exceeds b * f * ln2 (~22.18 at b=2, f=16).
  const double b = 2.0;
  const double bound = b * codec.frac_bits * std::log(2.0) + 0.01;
  const int trials = 2000;
  SimOptions opts;
  opts.seed = 12;
  auto sums = sim_parties(opts, [&](PartyEngine& e) {
    double mean = 0;
    int below = 0;
    for (int i = 0; i < trials; i++) {
      const double m = laplace_measure_mpc(e, q[e.id()], b);
      CHECK(std::fabs(m - 100.0) <= bound);
      mean += m / trials;
      below += m < 100.0 ? 1 : 0;
    }
    return std::pair{mean, below};
  });
  CHECK(std::fabs(sums[0].first - 100.0) < 0.15);
  // Sign symmetry.
  CHECK(double(sums[0].second) / trials > 0.46);
  CHECK(double(sums[0].second) / trials < 0.54);
}

TEST_CASE("pinned tape: secure and plaintext selection agree") {
  FixedCodec codec;
  std::mt19937_64 rng(13);
  std::mt19937_64 score_rng(14);
  std::uniform_real_distribution<double> score_dist(0.0, 30.0);
  std::uniform_int_distribution<int> len_dist(1, 32);

  const int cases = 200;
  const std::uint64_t tape_seed = 777;

  // Generate the score vectors up front so both modes see identical data.
  std::vector<std::vector<double>> all_scores(cases);
  for (auto& scores : all_scores) {
    scores.resize(len_dist(score_rng));
    for (auto& s : scores) s = score_dist(score_rng);
  }
  std::vector<std::array<std::vector<RepShare>, 3>> all_shares(cases);
  for (int c = 0; c < cases; c++) {
    std::vector<ring_t> enc;
    for (double s : all_scores[c]) enc.push_back(codec.encode(s));
    all_shares[c] = deal_vector(enc, rng);
  }

  const double eps_prime = 0.25;
  SimOptions opts;
  opts.seed = 15;
  opts.tape_seed = tape_seed;
  auto mpc_picks = sim_parties(opts, [&](PartyEngine& e) {
    std::vector<std::size_t> ks(cases);
    for (int c = 0; c < cases; c++) {
      const std::vector<double> approx(all_scores[c].size(), 0.0);
      ks[c] = em_select_mpc(e, all_shares[c][e.id()], approx, eps_prime);
    }
    return ks;
  });

  TapeJointRandom tape(tape_seed, codec.frac_bits);
  int mismatches = 0;
  for (int c = 0; c < cases; c++) {
    const auto& scores = all_scores[c];
    const std::size_t plain = em_select_plain(scores, eps_prime, tape);
    if (plain == mpc_picks[0][c]) continue;

    // Disagreement is only allowed at a fixed-point boundary: the
    // cumulative sum nearest the threshold within 2^-8.
    mismatches++;
    double max_w = 0;
    for (double s : scores) max_w = std::max(max_w, 0.5 * eps_prime * s);
    std::vector<double> cum(scores.size());
    double total = 0;
    for (std::size_t i = 0; i < scores.size(); i++) {
      total += std::exp(0.5 * eps_prime * scores[i] - max_w);
      cum[i] = total;
    }
    // Replay the tape draw this case consumed.
    TapeJointRandom replay(tape_seed, codec.frac_bits);
    double r = 0;
    for (int c2 = 0; c2 <= c; c2++) r = replay.selection_unit();
    double nearest = HUGE_VAL;
    for (double cv : cum) nearest = std::min(nearest, std::fabs(cv - r * total));
    CHECK(nearest <= std::exp2(-8));
  }
  CHECK(mismatches <= 5);
}
