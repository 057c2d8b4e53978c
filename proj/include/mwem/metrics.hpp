#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mwem/data_io.hpp"
#include "mwem/domain.hpp"

namespace mwem {

struct WorkloadError {
  double max_error = 0;
  double avg_error = 0;
};

// max_i and mean_i of |q_i(synth) - q_i(real)| / n, with n the real mass.
WorkloadError workload_error(std::span<const double> real_cells,
                             std::span<const double> synth_cells,
                             const QueryWorkload& workload);

// Total variation distance between the cell distributions (each side
// normalized to probability mass 1).
double tv_distance(std::span<const double> a, std::span<const double> b);

// Full-batch gradient-descent logistic regression over one-hot encoded
// categorical features. The label column is excluded from the features.
struct LrConfig {
  double learning_rate = 0.1;
  double tolerance = 1e-6;
  int max_iterations = 1000;
  double l2 = 0.0;
};

struct LrModel {
  std::vector<double> weights;  // one per one-hot feature
  double bias = 0;
};

// Binary targets from the label column: positive when the category index
// differs from 0, or equals `positive_category` when given.
std::vector<int> binary_labels(const RecordTable& table, std::size_t label_col,
                               std::optional<std::size_t> positive_category);

LrModel train_logistic(const RecordTable& table, const HistogramDomain& domain,
                       std::size_t label_col, std::span<const int> labels,
                       const LrConfig& config);

std::vector<double> lr_scores(const LrModel& model, const RecordTable& table,
                              const HistogramDomain& domain,
                              std::size_t label_col);

// Rank-statistic AUC with midrank tie handling; always in [0, 1].
double auc_roc(std::span<const double> scores, std::span<const int> labels);

}  // namespace mwem
