#include "mwem/domain.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

namespace mwem {

std::size_t HistogramDomain::cell_count() const {
  std::size_t n = 1;
  for (std::size_t c : cardinalities) n *= c;
  return n;
}

std::size_t HistogramDomain::cell_of(std::span<const std::size_t> tuple) const {
  if (tuple.size() != cardinalities.size()) {
    throw std::invalid_argument("cell_of: tuple arity mismatch");
  }
  std::size_t cell = 0;
  for (std::size_t i = 0; i < tuple.size(); i++) {
    if (tuple[i] >= cardinalities[i]) {
      throw std::invalid_argument("cell_of: category index out of range");
    }
    cell = cell * cardinalities[i] + tuple[i];
  }
  return cell;
}

std::vector<std::size_t> HistogramDomain::tuple_of(std::size_t cell) const {
  std::vector<std::size_t> tuple(cardinalities.size());
  for (std::size_t i = cardinalities.size(); i-- > 0;) {
    tuple[i] = cell % cardinalities[i];
    cell /= cardinalities[i];
  }
  return tuple;
}

double Histogram::total() const {
  double t = 0;
  for (double c : counts) t += c;
  return t;
}

double ApproxDistribution::mass() const {
  double t = 0;
  for (double w : weights) t += w;
  return t;
}

QueryWorkload gen_workload(const HistogramDomain& domain, std::size_t count,
                           std::uint64_t seed) {
  if (count < 1) {
    throw std::invalid_argument("gen_workload: need at least one query");
  }
  std::mt19937_64 rng(seed);
  const std::size_t cells = domain.cell_count();
  QueryWorkload workload;
  workload.reserve(count);

  for (std::size_t qi = 0; qi < count; qi++) {
    // Per attribute, a random non-empty category subset.
    std::vector<std::vector<char>> keep(domain.attribute_count());
    for (std::size_t a = 0; a < domain.attribute_count(); a++) {
      keep[a].assign(domain.cardinalities[a], 0);
      bool any = false;
      while (!any) {
        for (auto& flag : keep[a]) {
          flag = char(rng() & 1);
          any |= flag != 0;
        }
      }
    }

    LinearQuery q;
    q.coefficients.assign(cells, 0.0);
    std::vector<std::size_t> tuple(domain.attribute_count(), 0);
    for (std::size_t cell = 0; cell < cells; cell++) {
      bool in = true;
      for (std::size_t a = 0; a < tuple.size() && in; a++) {
        in = keep[a][tuple[a]] != 0;
      }
      q.coefficients[cell] = in ? 1.0 : 0.0;
      // Mixed-radix increment, last attribute fastest.
      for (std::size_t a = tuple.size(); a-- > 0;) {
        if (++tuple[a] < domain.cardinalities[a]) break;
        tuple[a] = 0;
      }
    }
    workload.push_back(std::move(q));
  }
  return workload;
}

double eval_query(const LinearQuery& q, std::span<const double> cells) {
  if (q.coefficients.size() != cells.size()) {
    throw std::invalid_argument("eval_query: dimension mismatch");
  }
  double acc = 0;
  for (std::size_t i = 0; i < cells.size(); i++) {
    acc += q.coefficients[i] * cells[i];
  }
  return acc;
}

RepShare eval_query_shared(const LinearQuery& q,
                           std::span<const RepShare> cells) {
  if (q.coefficients.size() != cells.size()) {
    throw std::invalid_argument("eval_query_shared: dimension mismatch");
  }
  RepShare acc{};
  for (std::size_t i = 0; i < cells.size(); i++) {
    const double c = q.coefficients[i];
    if (c == 0.0) continue;
    const std::int64_t ic = std::llround(c);
    if (double(ic) != c) {
      throw std::invalid_argument(
          "eval_query_shared: coefficients must be integer-valued");
    }
    acc = PartyEngine::add(acc, PartyEngine::mul_public(cells[i], to_ring(ic)));
  }
  return acc;
}

ApproxDistribution uniform_distribution(const HistogramDomain& domain,
                                        double mass) {
  const std::size_t cells = domain.cell_count();
  return ApproxDistribution{
      std::vector<double>(cells, mass / double(cells))};
}

void mw_update(ApproxDistribution& dist, const LinearQuery& q,
               double measurement) {
  const double n = dist.mass();
  const double approx = eval_query(q, dist.weights);
  double total = 0;
  for (std::size_t i = 0; i < dist.weights.size(); i++) {
    dist.weights[i] *= std::exp(q.coefficients[i] * (measurement - approx) /
                                (2.0 * n));
    total += dist.weights[i];
  }
  if (total <= 0 || !std::isfinite(total)) {
    // Unreachable in exact arithmetic; recover rather than divide by 0.
    std::fprintf(stderr,
                 "mw_update: degenerate weights, resetting to uniform\n");
    dist.weights.assign(dist.weights.size(), n / double(dist.weights.size()));
    return;
  }
  const double scale = n / total;
  for (double& w : dist.weights) w *= scale;
}

ApproxDistribution average_distributions(
    std::span<const ApproxDistribution> history, bool literal_mode) {
  if (history.empty()) {
    throw std::invalid_argument("average_distributions: empty history");
  }
  const std::size_t first = literal_mode ? 0 : 1;
  const std::size_t last = literal_mode ? history.size() - 1 : history.size();
  if (first >= last) {
    // A single snapshot: nothing to average.
    return history.front();
  }
  ApproxDistribution out{std::vector<double>(history[0].weights.size(), 0.0)};
  const double denom = double(last - first);
  for (std::size_t h = first; h < last; h++) {
    for (std::size_t i = 0; i < out.weights.size(); i++) {
      out.weights[i] += history[h].weights[i] / denom;
    }
  }
  return out;
}

}  // namespace mwem
