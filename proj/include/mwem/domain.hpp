#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mwem/engine.hpp"

namespace mwem {

// The discretized universe: the product of the categorical attribute
// ranges, with cells numbered row-major (last attribute fastest).
struct HistogramDomain {
  std::vector<std::string> attribute_names;
  std::vector<std::size_t> cardinalities;

  std::size_t attribute_count() const { return cardinalities.size(); }
  std::size_t cell_count() const;
  std::size_t cell_of(std::span<const std::size_t> tuple) const;
  std::vector<std::size_t> tuple_of(std::size_t cell) const;
};

// Per-cell counts; plain form of the dataset D.
struct Histogram {
  std::vector<double> counts;

  double total() const;
};

// The public synthetic distribution A, kept scaled to total mass n.
struct ApproxDistribution {
  std::vector<double> weights;

  double mass() const;
};

// Coefficient vector over the domain cells, entries in [-1, +1]. The
// workload generator only emits {0, 1} counting queries; shared
// evaluation relies on integer coefficients to stay communication-free.
struct LinearQuery {
  std::vector<double> coefficients;
};

using QueryWorkload = std::vector<LinearQuery>;

// Deterministic pseudo-random counting queries: per attribute a random
// non-empty category subset; cells in the subset product get weight 1.
QueryWorkload gen_workload(const HistogramDomain& domain, std::size_t count,
                           std::uint64_t seed);

// q(D) = sum_x q(x) D(x).
double eval_query(const LinearQuery& q, std::span<const double> cells);

// Shared evaluation of a public query against shared cell counts: a
// local linear combination, zero communication. Coefficients must be
// integer-valued (the workload generator guarantees {0, 1}).
RepShare eval_query_shared(const LinearQuery& q,
                           std::span<const RepShare> cells);

ApproxDistribution uniform_distribution(const HistogramDomain& domain,
                                        double mass);

// A(x) <- A(x) * exp(q(x) * (measurement - q(A)) / 2n), renormalized to
// mass n. Operates entirely on public data.
void mw_update(ApproxDistribution& dist, const LinearQuery& q,
               double measurement);

// Entrywise mean over the kept iterates. The default averages the
// post-update distributions A_1..A_T; literal mode averages A_0..A_{T-1}
// instead (which returns the uniform prior when T = 1).
ApproxDistribution average_distributions(
    std::span<const ApproxDistribution> history, bool literal_mode);

}  // namespace mwem
