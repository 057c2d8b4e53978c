#include "mwem/dp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mwem/primitives.hpp"

namespace mwem {

void PrivacyBudget::validate() const {
  if (!(epsilon > 0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("privacy budget: epsilon must be positive");
  }
  if (iterations < 1) {
    throw std::invalid_argument("privacy budget: iterations must be >= 1");
  }
}

std::size_t em_select_plain(std::span<const double> scores, double eps_prime,
                            JointRandom& rnd, double* boundary_gap) {
  if (scores.empty()) {
    throw std::invalid_argument("em_select_plain: no scores");
  }
  const std::size_t n = scores.size();
  std::vector<double> weight(n);
  double max_err = -HUGE_VAL;
  for (std::size_t i = 0; i < n; i++) {
    weight[i] = 0.5 * eps_prime * scores[i];
    max_err = std::max(max_err, weight[i]);
  }
  double total = 0;
  for (std::size_t i = 0; i < n; i++) {
    weight[i] = std::exp(weight[i] - max_err);
    total += weight[i];
  }
  const double threshold = rnd.selection_unit() * total;
  double cumulative = 0;
  std::size_t selected = n;
  bool found = false;
  double gap = HUGE_VAL;
  for (std::size_t i = 0; i < n; i++) {
    cumulative += weight[i];
    gap = std::min(gap, std::fabs(cumulative - threshold));
    if (!found && cumulative > threshold) {
      selected = i + 1;
      found = true;
    }
  }
  if (boundary_gap) *boundary_gap = gap;
  return selected;
}

double laplace_plain(double value, double b, JointRandom& rnd) {
  if (b < 0) {
    throw std::invalid_argument("laplace_plain: negative scale");
  }
  if (b == 0) return value;
  const double u = rnd.laplace_unit();
  const double c = rnd.sign_bit() ? 1.0 : -1.0;
  return value + b * std::log(u) * c;
}

namespace {

// Lines 1-9 of the selection protocol: shared cumulative weights
// c[i] = sum_{j<=i} exp(err[j] - max err) and their total.
std::vector<RepShare> cumulative_weights(PartyEngine& e,
                                         std::span<const RepShare> shared_answers,
                                         std::span<const double> approx_answers,
                                         double eps_prime) {
  const FixedCodec& codec = e.codec();
  const std::size_t n = shared_answers.size();

  // Shared |q(D) - q(A)|: sign via comparison with 0, then one multiply
  // by 1 - 2*sign. The factor is integer-valued, so the product keeps
  // f fractional bits with no rescaling.
  std::vector<RepShare> diff(n);
  for (std::size_t i = 0; i < n; i++) {
    diff[i] = e.add_public(shared_answers[i],
                           ring_t(0) - codec.encode(approx_answers[i]));
  }
  const std::vector<ring_t> zeros(n, 0);
  auto sign = less_than_public(e, diff, zeros);
  std::vector<RepShare> factor(n);
  for (std::size_t i = 0; i < n; i++) {
    factor[i] = e.add_public(PartyEngine::mul_public(sign[i], ring_t(0) - 2), 1);
  }
  auto abs_diff = e.mul(factor, diff);

  // err[i] = 0.5 * eps' * |diff|, then exp(err[i] - max err).
  std::vector<RepShare> raw(n);
  const ring_t half_eps = codec.encode(0.5 * eps_prime);
  for (std::size_t i = 0; i < n; i++) {
    raw[i] = PartyEngine::mul_public(abs_diff[i], half_eps);
  }
  auto err = e.trunc(raw);
  RepShare max_err = maximum(e, err);
  std::vector<RepShare> shifted(n);
  for (std::size_t i = 0; i < n; i++) {
    shifted[i] = PartyEngine::sub(err[i], max_err);
  }
  auto weights = exp_nonpositive(e, shifted);

  std::vector<RepShare> cumulative(n);
  RepShare es{};
  for (std::size_t i = 0; i < n; i++) {
    es = PartyEngine::add(es, weights[i]);
    cumulative[i] = es;
  }
  return cumulative;
}

// Lines 10-23, vectorized over independent trials: per-trial random
// threshold, strict above-threshold count, edge-corrected index.
std::vector<std::size_t> sample_stage_batch(PartyEngine& e,
                                            std::span<const RepShare> cumulative,
                                            std::span<const RepShare> thresholds) {
  const std::size_t n = cumulative.size();
  const std::size_t trials = thresholds.size();

  std::vector<RepShare> trep(trials * n), crep(trials * n);
  for (std::size_t b = 0; b < trials; b++) {
    for (std::size_t i = 0; i < n; i++) {
      trep[b * n + i] = thresholds[b];
      crep[b * n + i] = cumulative[i];
    }
  }
  auto above = less_than(e, trep, crep);

  std::vector<RepShare> s(trials);
  for (std::size_t b = 0; b < trials; b++) {
    RepShare acc{};
    for (std::size_t i = 0; i < n; i++) {
      acc = PartyEngine::add(acc, above[b * n + i]);
    }
    s[b] = acc;
  }

  const std::vector<ring_t> zeros(trials, 0);
  auto cnd = equal_public(e, s, zeros);

  std::vector<RepShare> s_minus_1(trials), not_cnd(trials);
  for (std::size_t b = 0; b < trials; b++) {
    s_minus_1[b] = e.add_public(s[b], ring_t(0) - 1);
    not_cnd[b] = PartyEngine::sub(e.public_share(1), cnd[b]);
  }
  auto corrected = e.mul(s_minus_1, not_cnd);
  std::vector<RepShare> k(trials);
  for (std::size_t b = 0; b < trials; b++) {
    k[b] = PartyEngine::sub(e.public_share(ring_t(n)), corrected[b]);
  }
  const auto opened = e.open(k, OpenKind::QueryIndex);
  std::vector<std::size_t> out(trials);
  for (std::size_t b = 0; b < trials; b++) out[b] = std::size_t(opened[b]);
  return out;
}

}  // namespace

std::vector<std::size_t> em_select_mpc_batch(
    PartyEngine& e, std::span<const RepShare> shared_answers,
    std::span<const double> approx_answers, double eps_prime,
    std::size_t trials) {
  if (shared_answers.empty()) {
    throw std::invalid_argument("em_select_mpc: no queries");
  }
  if (shared_answers.size() != approx_answers.size()) {
    throw std::invalid_argument("em_select_mpc: answer size mismatch");
  }
  const auto cumulative =
      cumulative_weights(e, shared_answers, approx_answers, eps_prime);
  const RepShare es = cumulative.back();

  auto r = unit_uniform_batch(e, trials);
  std::vector<RepShare> es_rep(trials, es);
  auto t = e.trunc(e.mul(es_rep, r));
  return sample_stage_batch(e, cumulative, t);
}

std::size_t em_select_mpc(PartyEngine& e,
                          std::span<const RepShare> shared_answers,
                          std::span<const double> approx_answers,
                          double eps_prime) {
  return em_select_mpc_batch(e, shared_answers, approx_answers, eps_prime, 1)[0];
}

std::size_t em_sample_stage(PartyEngine& e,
                            std::span<const RepShare> cumulative,
                            RepShare threshold) {
  if (cumulative.empty()) {
    throw std::invalid_argument("em_sample_stage: no cumulative sums");
  }
  const std::vector<RepShare> one(1, threshold);
  return sample_stage_batch(e, cumulative, one)[0];
}

double laplace_measure_mpc(PartyEngine& e, RepShare shared_answer, double b) {
  return laplace_measure_mpc_batch(e, shared_answer, b, 1)[0];
}

std::vector<double> laplace_measure_mpc_batch(PartyEngine& e,
                                              RepShare shared_answer, double b,
                                              std::size_t trials) {
  if (b < 0) {
    throw std::invalid_argument("laplace_measure_mpc: negative scale");
  }
  const FixedCodec& codec = e.codec();

  // x = 1 - u lands in [2^-f, 1], the domain of the shared logarithm.
  auto u = unit_uniform_batch(e, trials);
  std::vector<RepShare> x(trials);
  for (std::size_t i = 0; i < trials; i++) {
    x[i] = PartyEngine::sub(e.public_share(codec.encode(1.0)), u[i]);
  }
  auto ln_x = log_unit_interval(e, x);

  auto sign = e.random_bit_shares(trials);
  std::vector<RepShare> c(trials);
  for (std::size_t i = 0; i < trials; i++) {
    c[i] = e.add_public(PartyEngine::mul_public(sign[i], 2), ring_t(0) - 1);
  }
  auto signed_ln = e.mul(ln_x, c);
  const ring_t scale = codec.encode(b);
  std::vector<RepShare> raw(trials);
  for (std::size_t i = 0; i < trials; i++) {
    raw[i] = PartyEngine::mul_public(signed_ln[i], scale);
  }
  auto noise = e.trunc(raw);

  std::vector<RepShare> m(trials);
  for (std::size_t i = 0; i < trials; i++) {
    m[i] = PartyEngine::add(shared_answer, noise[i]);
  }
  const auto opened = e.open(m, OpenKind::Measurement);
  std::vector<double> out(trials);
  for (std::size_t i = 0; i < trials; i++) out[i] = codec.decode(opened[i]);
  return out;
}

}  // namespace mwem
