#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mwem/metrics.hpp"

using namespace mwem;

TEST_CASE("workload error") {
  std::vector<double> real = {10, 20, 30, 40};
  QueryWorkload workload = {LinearQuery{{1, 0, 1, 0}},
                            LinearQuery{{1, 1, 1, 1}}};

  // Synthetic equal to real: zero error.
  const auto zero = workload_error(real, real, workload);
  CHECK(zero.max_error == 0.0);
  CHECK(zero.avg_error == 0.0);

  // Mass-preserving all-ones query sees no gap between uniform and a
  // point mass.
  std::vector<double> point = {100, 0, 0, 0};
  std::vector<double> uniform = {25, 25, 25, 25};
  QueryWorkload all_ones = {LinearQuery{{1, 1, 1, 1}}};
  const auto same_mass = workload_error(point, uniform, all_ones);
  CHECK(same_mass.max_error == 0.0);

  // Brute-force recomputation on a random instance.
  std::mt19937_64 rng(3);
  std::vector<double> synth(4);
  for (auto& v : synth) v = double(rng() % 100);
  const auto got = workload_error(real, synth, workload);
  double n = 0, emax = 0, eavg = 0;
  for (double v : real) n += v;
  for (const auto& q : workload) {
    double qa = 0, qd = 0;
    for (std::size_t i = 0; i < 4; i++) {
      qa += q.coefficients[i] * synth[i];
      qd += q.coefficients[i] * real[i];
    }
    const double gap = std::fabs(qa - qd) / n;
    emax = std::max(emax, gap);
    eavg += gap / double(workload.size());
  }
  CHECK(got.max_error == doctest::Approx(emax).epsilon(1e-9));
  CHECK(got.avg_error == doctest::Approx(eavg).epsilon(1e-9));

  std::vector<double> wrong = {1, 2};
  CHECK_THROWS_AS(workload_error(real, wrong, workload), std::invalid_argument);
}

TEST_CASE("total variation distance") {
  std::vector<double> a = {50, 50};
  std::vector<double> b = {100, 0};
  CHECK(tv_distance(a, a) == 0.0);
  CHECK(tv_distance(a, b) == doctest::Approx(0.5));
  // Scale invariance: only the normalized shapes matter.
  std::vector<double> a2 = {5, 5};
  CHECK(tv_distance(a2, b) == doctest::Approx(0.5));
}

TEST_CASE("auc by rank statistic") {
  // Hand-sized set: scores 0.9, 0.8 positive; 0.7, 0.1 negative.
  std::vector<double> scores = {0.9, 0.8, 0.7, 0.1};
  std::vector<int> labels = {1, 1, 0, 0};
  CHECK(auc_roc(scores, labels) == doctest::Approx(1.0));

  // Perfectly anti-ranked: 0.
  std::vector<int> inverted = {0, 0, 1, 1};
  CHECK(auc_roc(scores, inverted) == doctest::Approx(0.0));

  // Ties get midranks: all-equal scores give 0.5.
  std::vector<double> flat = {0.5, 0.5, 0.5, 0.5};
  CHECK(auc_roc(flat, labels) == doctest::Approx(0.5));

  // Invariance under strictly monotone transforms of the scores.
  std::mt19937_64 rng(7);
  std::vector<double> s(500);
  std::vector<int> l(500);
  for (std::size_t i = 0; i < s.size(); i++) {
    s[i] = double(rng() % 1000) / 1000.0;
    l[i] = int(rng() % 2);
  }
  std::vector<double> mono(s.size());
  for (std::size_t i = 0; i < s.size(); i++) mono[i] = std::exp(3.0 * s[i]) - 2;
  const double base = auc_roc(s, l);
  CHECK(base >= 0.0);
  CHECK(base <= 1.0);
  CHECK(auc_roc(mono, l) == doctest::Approx(base).epsilon(1e-12));

  std::vector<int> single(500, 1);
  CHECK_THROWS_AS(auc_roc(s, single), std::invalid_argument);
}

TEST_CASE("logistic regression on separable data") {
  // grade = hi iff color is blue: perfectly separable.
  HistogramDomain domain{{"color", "size", "grade"}, {3, 2, 2}};
  RecordTable train;
  std::mt19937_64 rng(8);
  for (int i = 0; i < 300; i++) {
    const std::size_t color = rng() % 3;
    const std::size_t size = rng() % 2;
    train.rows.push_back({color, size, color == 2 ? std::size_t(1) : 0});
  }
  const auto labels = binary_labels(train, 2, std::nullopt);
  const auto model = train_logistic(train, domain, 2, labels, LrConfig{});
  const auto scores = lr_scores(model, train, domain, 2);
  CHECK(auc_roc(scores, labels) == doctest::Approx(1.0));
}

TEST_CASE("logistic regression near-chance on independent labels") {
  HistogramDomain domain{{"x", "y", "label"}, {4, 4, 2}};
  RecordTable table;
  std::mt19937_64 rng(9);
  for (int i = 0; i < 10000; i++) {
    table.rows.push_back({rng() % 4, rng() % 4, rng() % 2});
  }
  const auto labels = binary_labels(table, 2, std::nullopt);
  const auto model = train_logistic(table, domain, 2, labels, LrConfig{});
  const auto scores = lr_scores(model, table, domain, 2);
  const double auc = auc_roc(scores, labels);
  CHECK(auc > 0.47);
  CHECK(auc < 0.53);
}

TEST_CASE("logistic regression refuses single-class training data") {
  HistogramDomain domain{{"x", "label"}, {2, 2}};
  RecordTable table;
  for (int i = 0; i < 10; i++) table.rows.push_back({std::size_t(i % 2), 0});
  const auto labels = binary_labels(table, 1, std::nullopt);
  CHECK_THROWS_AS(train_logistic(table, domain, 1, labels, LrConfig{}),
                  std::invalid_argument);
}

TEST_CASE("positive-category binarization") {
  RecordTable table;
  table.rows = {{0, 0}, {0, 1}, {0, 2}};
  CHECK(binary_labels(table, 1, std::nullopt) == std::vector<int>{0, 1, 1});
  CHECK(binary_labels(table, 1, std::size_t(2)) == std::vector<int>{0, 0, 1});
}
