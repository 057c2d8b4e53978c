#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mwem/domain.hpp"
#include "mwem/dp.hpp"
#include "mwem/engine.hpp"
#include "mwem/transport.hpp"

namespace mwem {

struct MwemConfig {
  PrivacyBudget budget{};
  std::size_t num_queries = 400;
  std::uint64_t workload_seed = 1;
  std::uint64_t mechanism_seed = 1;
  // Deterministic joint-randomness tape shared by both modes; voids the
  // DP guarantee and exists for the cross-mode equivalence tests.
  std::optional<std::uint64_t> tape_seed;
  bool literal_averaging = false;
  int frac_bits = 16;

  void validate() const;
};

struct IterationRecord {
  std::size_t query_number;  // 1-based, as selected
  double measurement;
};

struct PhaseTimings {
  double setup_seconds = 0;
  double select_seconds = 0;
  double measure_seconds = 0;
  double update_seconds = 0;
  double total_seconds = 0;
};

struct RunResult {
  ApproxDistribution output;
  std::vector<IterationRecord> iterations;
  PhaseTimings timings;
  // Central mode only: per-iteration distance from the selection
  // threshold to the nearest cumulative weight (boundary-tie witness
  // for cross-mode comparisons).
  std::vector<double> selection_boundary_gaps;
};

// Centralized reference: the trusted-curator loop over plaintext data.
RunResult run_mwem_central(const MwemConfig& config, const Histogram& data,
                           const HistogramDomain& domain,
                           const QueryWorkload& workload);

// Coordinator-party control messages ride Data frames whose first
// payload element is the command; doubles travel as IEEE-754 bit
// patterns in ring elements. Replies come back on OpenBroadcast frames.
enum class CoordCommand : ring_t {
  Configure = 1,
  Iterate = 2,
  Done = 3,
};

// Serves one full run on the party side: receives the configuration,
// evaluates the shared query answers once, then answers selection and
// measurement phases until told to stop. The shared histogram is this
// party's aggregated share of the cell counts.
void run_mwem_party(PartyEngine& engine, const HistogramDomain& domain,
                    const std::vector<RepShare>& shared_histogram);

// Drives the distributed run from the coordinator seat. The coordinator
// holds no shares and learns only the per-iteration selected index and
// noisy measurement. `total_records` is the public record count n.
RunResult run_mwem_coordinator(Transport& transport, const MwemConfig& config,
                               const HistogramDomain& domain,
                               const QueryWorkload& workload,
                               double total_records);

// In-process distributed run: three party engines plus the coordinator
// over the simulation transport. Shares of the histogram are dealt from
// plaintext data with a dealer RNG (the data-holder role).
RunResult run_mwem_distributed_sim(const MwemConfig& config,
                                   const Histogram& data,
                                   const HistogramDomain& domain,
                                   const QueryWorkload& workload,
                                   std::vector<std::vector<OpenRecord>>*
                                       open_logs = nullptr);

}  // namespace mwem
