#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mwem/domain.hpp"
#include "mwem/engine.hpp"
#include "mwem/ring.hpp"

namespace mwem {

// Sidecar schema: one line per column, `name categorical cat1,cat2,...`
// with an optional trailing `label` marker. Explicit so every data
// holder discretizes identically.
struct SchemaColumn {
  std::string name;
  std::vector<std::string> categories;
  bool is_label = false;
};

struct Schema {
  std::vector<SchemaColumn> columns;

  static Schema load(const std::string& path);
  static Schema parse(const std::string& text);

  HistogramDomain domain() const;
  std::optional<std::size_t> label_column() const;
  std::size_t category_index(std::size_t column, const std::string& value) const;
};

// Rows as category indices, one entry per schema column.
struct RecordTable {
  std::vector<std::vector<std::size_t>> rows;
};

// RFC-style CSV with a header row that must match the schema column
// names in order. Unknown categories fail naming the row and column.
RecordTable load_csv(const std::string& path, const Schema& schema);
void write_csv(const std::string& path, const RecordTable& table,
               const Schema& schema);

Histogram build_histogram(const RecordTable& table,
                          const HistogramDomain& domain);

// One holder's replicated sharing of its local histogram, fixed-point
// encoded. Binary layout: magic "MWEMSHR1", then 8-byte little-endian
// words version, k, f, domain size, party id, holder id, then cell
// share pairs (a, b), little-endian.
constexpr std::uint64_t kShareFileVersion = 1;

struct ShareFile {
  std::uint64_t party_id = 0;
  std::uint64_t holder_id = 0;
  int frac_bits = 16;
  std::size_t domain_size = 0;
  std::vector<RepShare> shares;
};

std::array<ShareFile, 3> share_histogram(const Histogram& hist,
                                         const FixedCodec& codec,
                                         std::uint64_t holder_id,
                                         std::mt19937_64& rng);
void write_share_file(const std::string& path, const ShareFile& file);
ShareFile load_share_file(const std::string& path);

// Local addition of the holders' sharings (no communication). All files
// must belong to the same party and agree on codec and domain size.
std::vector<RepShare> aggregate_share_files(const std::vector<ShareFile>& files,
                                            int expected_party,
                                            const FixedCodec& codec);

// n i.i.d. draws from A / mass(A), mapped back to attribute tuples.
RecordTable sample_synthetic(const ApproxDistribution& dist,
                             const HistogramDomain& domain, std::size_t n,
                             std::uint64_t seed);

}  // namespace mwem
