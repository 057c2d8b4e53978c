#include "mwem/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mwem {

WorkloadError workload_error(std::span<const double> real_cells,
                             std::span<const double> synth_cells,
                             const QueryWorkload& workload) {
  if (real_cells.size() != synth_cells.size()) {
    throw std::invalid_argument("workload_error: dimension mismatch");
  }
  double n = 0;
  for (double c : real_cells) n += c;
  if (n <= 0) {
    throw std::invalid_argument("workload_error: empty real histogram");
  }
  WorkloadError err;
  for (const LinearQuery& q : workload) {
    const double gap =
        std::fabs(eval_query(q, synth_cells) - eval_query(q, real_cells)) / n;
    err.max_error = std::max(err.max_error, gap);
    err.avg_error += gap / double(workload.size());
  }
  return err;
}

double tv_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("tv_distance: dimension mismatch");
  }
  double na = 0, nb = 0;
  for (double v : a) na += v;
  for (double v : b) nb += v;
  if (na <= 0 || nb <= 0) {
    throw std::invalid_argument("tv_distance: empty histogram");
  }
  double d = 0;
  for (std::size_t i = 0; i < a.size(); i++) {
    d += std::fabs(a[i] / na - b[i] / nb);
  }
  return 0.5 * d;
}

namespace {

// One-hot layout: features of every column except the label,
// concatenated in column order.
struct FeatureLayout {
  std::vector<std::size_t> offsets;  // per non-label column
  std::vector<std::size_t> columns;  // source column index
  std::size_t width = 0;
};

FeatureLayout layout_features(const HistogramDomain& domain,
                              std::size_t label_col) {
  FeatureLayout fl;
  for (std::size_t c = 0; c < domain.attribute_count(); c++) {
    if (c == label_col) continue;
    fl.offsets.push_back(fl.width);
    fl.columns.push_back(c);
    fl.width += domain.cardinalities[c];
  }
  return fl;
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

std::vector<int> binary_labels(const RecordTable& table, std::size_t label_col,
                               std::optional<std::size_t> positive_category) {
  std::vector<int> labels;
  labels.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    if (label_col >= row.size()) {
      throw std::invalid_argument("binary_labels: label column out of range");
    }
    const std::size_t v = row[label_col];
    labels.push_back(positive_category ? int(v == *positive_category)
                                       : int(v != 0));
  }
  return labels;
}

LrModel train_logistic(const RecordTable& table, const HistogramDomain& domain,
                       std::size_t label_col, std::span<const int> labels,
                       const LrConfig& config) {
  if (table.rows.size() != labels.size() || labels.empty()) {
    throw std::invalid_argument("train_logistic: bad training set");
  }
  const int first = labels[0];
  if (std::all_of(labels.begin(), labels.end(),
                  [&](int l) { return l == first; })) {
    throw std::invalid_argument("train_logistic: single-class training labels");
  }

  const FeatureLayout fl = layout_features(domain, label_col);
  const std::size_t m = table.rows.size();
  LrModel model;
  model.weights.assign(fl.width, 0.0);

  double prev_loss = HUGE_VAL;
  std::vector<double> grad(fl.width);
  for (int iter = 0; iter < config.max_iterations; iter++) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double grad_bias = 0;
    double loss = 0;
    for (std::size_t r = 0; r < m; r++) {
      double z = model.bias;
      for (std::size_t f = 0; f < fl.columns.size(); f++) {
        z += model.weights[fl.offsets[f] + table.rows[r][fl.columns[f]]];
      }
      const double p = sigmoid(z);
      const double y = double(labels[r]);
      loss += -(y * std::log(std::max(p, 1e-12)) +
                (1 - y) * std::log(std::max(1 - p, 1e-12)));
      const double g = p - y;
      grad_bias += g;
      for (std::size_t f = 0; f < fl.columns.size(); f++) {
        grad[fl.offsets[f] + table.rows[r][fl.columns[f]]] += g;
      }
    }
    loss /= double(m);
    if (config.l2 > 0) {
      for (double w : model.weights) loss += 0.5 * config.l2 * w * w;
    }

    model.bias -= config.learning_rate * grad_bias / double(m);
    for (std::size_t j = 0; j < fl.width; j++) {
      double g = grad[j] / double(m);
      if (config.l2 > 0) g += config.l2 * model.weights[j];
      model.weights[j] -= config.learning_rate * g;
    }
    if (std::fabs(prev_loss - loss) < config.tolerance) break;
    prev_loss = loss;
  }
  return model;
}

std::vector<double> lr_scores(const LrModel& model, const RecordTable& table,
                              const HistogramDomain& domain,
                              std::size_t label_col) {
  const FeatureLayout fl = layout_features(domain, label_col);
  std::vector<double> scores;
  scores.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    double z = model.bias;
    for (std::size_t f = 0; f < fl.columns.size(); f++) {
      z += model.weights[fl.offsets[f] + row[fl.columns[f]]];
    }
    scores.push_back(sigmoid(z));
  }
  return scores;
}

double auc_roc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size() || scores.empty()) {
    throw std::invalid_argument("auc_roc: bad inputs");
  }
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });

  // Midranks over tied scores, then the Mann-Whitney statistic.
  std::vector<double> rank(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) j++;
    const double mid = 0.5 * double(i + j) + 1.0;
    for (std::size_t k = i; k <= j; k++) rank[order[k]] = mid;
    i = j + 1;
  }

  double pos_rank_sum = 0;
  std::size_t positives = 0;
  for (std::size_t r = 0; r < n; r++) {
    if (labels[r]) {
      pos_rank_sum += rank[r];
      positives++;
    }
  }
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) {
    throw std::invalid_argument("auc_roc: need both classes in the test set");
  }
  return (pos_rank_sum - 0.5 * double(positives) * double(positives + 1)) /
         (double(positives) * double(negatives));
}

}  // namespace mwem
