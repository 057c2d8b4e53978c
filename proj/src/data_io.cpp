#include "mwem/data_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "mwem/errors.hpp"
#include "mwem/tape.hpp"

namespace mwem {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

// One CSV record, double-quote aware ("" escapes a quote).
std::vector<std::string> split_csv(const std::string& line,
                                   std::size_t line_no) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); i++) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          i++;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"' && cur.empty()) {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  if (quoted) {
    throw FormatError("csv line " + std::to_string(line_no) +
                      ": unterminated quote");
  }
  out.push_back(cur);
  return out;
}

void put_word(std::ofstream& out, std::uint64_t v) {
  char buf[8];
  for (int i = 0; i < 8; i++) buf[i] = char((v >> (8 * i)) & 0xff);
  out.write(buf, 8);
}

std::uint64_t get_word(std::ifstream& in, const std::string& path) {
  char buf[8];
  if (!in.read(buf, 8)) {
    throw FormatError(path + ": truncated share file");
  }
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; i--) v = (v << 8) | std::uint8_t(buf[i]);
  return v;
}

}  // namespace

Schema Schema::parse(const std::string& text) {
  Schema schema;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    line_no++;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;

    std::istringstream fields(line);
    SchemaColumn col;
    std::string type, cats, marker;
    fields >> col.name >> type >> cats >> marker;
    if (col.name.empty() || type.empty() || cats.empty()) {
      throw FormatError("schema line " + std::to_string(line_no) +
                        ": expected 'name categorical cat1,cat2,...'");
    }
    if (type != "categorical") {
      throw FormatError("schema line " + std::to_string(line_no) +
                        ": unsupported column type '" + type + "'");
    }
    col.categories = split(cats, ',');
    for (const auto& c : col.categories) {
      if (c.empty()) {
        throw FormatError("schema line " + std::to_string(line_no) +
                          ": empty category name");
      }
      if (std::count(col.categories.begin(), col.categories.end(), c) != 1) {
        throw FormatError("schema line " + std::to_string(line_no) +
                          ": duplicate category '" + c + "'");
      }
    }
    if (marker == "label") {
      col.is_label = true;
    } else if (!marker.empty()) {
      throw FormatError("schema line " + std::to_string(line_no) +
                        ": unexpected trailing token '" + marker + "'");
    }
    schema.columns.push_back(std::move(col));
  }
  if (schema.columns.empty()) {
    throw FormatError("schema: no columns");
  }
  std::size_t labels = 0;
  for (const auto& c : schema.columns) labels += c.is_label ? 1 : 0;
  if (labels > 1) {
    throw FormatError("schema: more than one label column");
  }
  return schema;
}

Schema Schema::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw FormatError("cannot open schema file: " + path);
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

HistogramDomain Schema::domain() const {
  HistogramDomain d;
  for (const auto& col : columns) {
    d.attribute_names.push_back(col.name);
    d.cardinalities.push_back(col.categories.size());
  }
  return d;
}

std::optional<std::size_t> Schema::label_column() const {
  for (std::size_t i = 0; i < columns.size(); i++) {
    if (columns[i].is_label) return i;
  }
  return std::nullopt;
}

std::size_t Schema::category_index(std::size_t column,
                                   const std::string& value) const {
  const auto& cats = columns[column].categories;
  const auto it = std::find(cats.begin(), cats.end(), value);
  if (it == cats.end()) {
    throw FormatError("unknown category '" + value + "' in column '" +
                      columns[column].name + "'");
  }
  return std::size_t(it - cats.begin());
}

RecordTable load_csv(const std::string& path, const Schema& schema) {
  std::ifstream in(path);
  if (!in) {
    throw FormatError("cannot open csv file: " + path);
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw FormatError(path + ": missing header row");
  }
  const auto header = split_csv(line, 1);
  if (header.size() != schema.columns.size()) {
    throw FormatError(path + ": header has " + std::to_string(header.size()) +
                      " columns, schema expects " +
                      std::to_string(schema.columns.size()));
  }
  for (std::size_t i = 0; i < header.size(); i++) {
    if (header[i] != schema.columns[i].name) {
      throw FormatError(path + ": header column '" + header[i] +
                        "' does not match schema column '" +
                        schema.columns[i].name + "'");
    }
  }

  RecordTable table;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    line_no++;
    if (line.empty()) continue;
    const auto fields = split_csv(line, line_no);
    if (fields.size() != schema.columns.size()) {
      throw FormatError(path + " line " + std::to_string(line_no) +
                        ": wrong field count");
    }
    std::vector<std::size_t> row(fields.size());
    for (std::size_t c = 0; c < fields.size(); c++) {
      try {
        row[c] = schema.category_index(c, fields[c]);
      } catch (const FormatError& err) {
        throw FormatError(path + " line " + std::to_string(line_no) + ": " +
                          err.what());
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_csv(const std::string& path, const RecordTable& table,
               const Schema& schema) {
  std::ofstream out(path);
  if (!out) {
    throw FormatError("cannot write csv file: " + path);
  }
  for (std::size_t c = 0; c < schema.columns.size(); c++) {
    out << (c ? "," : "") << schema.columns[c].name;
  }
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); c++) {
      out << (c ? "," : "") << schema.columns[c].categories[row[c]];
    }
    out << "\n";
  }
}

Histogram build_histogram(const RecordTable& table,
                          const HistogramDomain& domain) {
  Histogram hist{std::vector<double>(domain.cell_count(), 0.0)};
  for (const auto& row : table.rows) {
    hist.counts[domain.cell_of(row)] += 1.0;
  }
  return hist;
}

std::array<ShareFile, 3> share_histogram(const Histogram& hist,
                                         const FixedCodec& codec,
                                         std::uint64_t holder_id,
                                         std::mt19937_64& rng) {
  std::array<ShareFile, 3> out;
  for (int p = 0; p < 3; p++) {
    out[p].party_id = std::uint64_t(p);
    out[p].holder_id = holder_id;
    out[p].frac_bits = codec.frac_bits;
    out[p].domain_size = hist.counts.size();
    out[p].shares.reserve(hist.counts.size());
  }
  for (double count : hist.counts) {
    const auto s = make_shares(codec.encode(count), rng);
    for (int p = 0; p < 3; p++) out[p].shares.push_back(s[p]);
  }
  return out;
}

void write_share_file(const std::string& path, const ShareFile& file) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw FormatError("cannot write share file: " + path);
  }
  out.write("MWEMSHR1", 8);
  put_word(out, kShareFileVersion);
  put_word(out, 64);
  put_word(out, std::uint64_t(file.frac_bits));
  put_word(out, file.domain_size);
  put_word(out, file.party_id);
  put_word(out, file.holder_id);
  for (const RepShare& s : file.shares) {
    put_word(out, s.a);
    put_word(out, s.b);
  }
  if (!out) {
    throw FormatError("failed writing share file: " + path);
  }
}

ShareFile load_share_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw FormatError("cannot open share file: " + path);
  }
  char magic[8];
  if (!in.read(magic, 8) || std::string(magic, 8) != "MWEMSHR1") {
    throw FormatError(path + ": bad share file magic");
  }
  ShareFile file;
  const std::uint64_t version = get_word(in, path);
  if (version != kShareFileVersion) {
    throw FormatError(path + ": unsupported share file version " +
                      std::to_string(version));
  }
  const std::uint64_t k = get_word(in, path);
  if (k != 64) {
    throw FormatError(path + ": unsupported ring width " + std::to_string(k));
  }
  file.frac_bits = int(get_word(in, path));
  file.domain_size = std::size_t(get_word(in, path));
  file.party_id = get_word(in, path);
  file.holder_id = get_word(in, path);
  if (file.party_id > 2) {
    throw FormatError(path + ": party id out of range");
  }
  file.shares.resize(file.domain_size);
  for (auto& s : file.shares) {
    s.a = get_word(in, path);
    s.b = get_word(in, path);
  }
  char extra;
  if (in.read(&extra, 1)) {
    throw FormatError(path + ": trailing bytes after share payload");
  }
  return file;
}

std::vector<RepShare> aggregate_share_files(const std::vector<ShareFile>& files,
                                            int expected_party,
                                            const FixedCodec& codec) {
  if (files.empty()) {
    throw std::invalid_argument("aggregate_share_files: no files");
  }
  std::vector<RepShare> total(files[0].domain_size);
  for (const ShareFile& f : files) {
    if (f.party_id != std::uint64_t(expected_party)) {
      throw FormatError("share file for party " + std::to_string(f.party_id) +
                        " given to party " + std::to_string(expected_party));
    }
    if (f.frac_bits != codec.frac_bits) {
      throw FormatError("share file codec mismatch: f=" +
                        std::to_string(f.frac_bits) + " vs configured f=" +
                        std::to_string(codec.frac_bits));
    }
    if (f.domain_size != total.size()) {
      throw FormatError("share file domain size mismatch");
    }
    for (std::size_t i = 0; i < total.size(); i++) {
      total[i] = PartyEngine::add(total[i], f.shares[i]);
    }
  }
  return total;
}

RecordTable sample_synthetic(const ApproxDistribution& dist,
                             const HistogramDomain& domain, std::size_t n,
                             std::uint64_t seed) {
  if (dist.weights.size() != domain.cell_count()) {
    throw std::invalid_argument("sample_synthetic: distribution/domain mismatch");
  }
  std::vector<double> cumulative(dist.weights.size());
  double total = 0;
  for (std::size_t i = 0; i < dist.weights.size(); i++) {
    total += std::max(0.0, dist.weights[i]);
    cumulative[i] = total;
  }
  if (total <= 0) {
    throw std::invalid_argument("sample_synthetic: empty distribution");
  }

  PlainRng rng(seed);
  RecordTable table;
  table.rows.reserve(n);
  for (std::size_t i = 0; i < n; i++) {
    const double u = rng.uniform() * total;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    const std::size_t cell =
        std::min(std::size_t(it - cumulative.begin()), cumulative.size() - 1);
    table.rows.push_back(domain.tuple_of(cell));
  }
  return table;
}

}  // namespace mwem
