#include "uapids/flow_data.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>

#include "uapids/checkpoint.hpp"
#include "uapids/errors.hpp"
#include "uapids/rng.hpp"

namespace uapids {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r' || s.front() == '\n' ||
                        s.front() == '\xEF' || s.front() == '\xBB' || s.front() == '\xBF')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n')) {
    s.remove_suffix(1);
  }
  return s;
}

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) != std::tolower(static_cast<unsigned char>(b[i]))) return false;
  }
  return true;
}

void split_fields(std::string_view line, std::vector<std::string_view>& out) {
  out.clear();
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

enum class TokenKind { kNumber, kInfinity, kNaN, kBad };

TokenKind parse_token(std::string_view tok, double& value) {
  tok = trim(tok);
  if (tok.empty()) return TokenKind::kBad;
  if (iequals(tok, "infinity") || iequals(tok, "inf") || iequals(tok, "+infinity") || iequals(tok, "+inf")) {
    return TokenKind::kInfinity;
  }
  if (iequals(tok, "nan")) return TokenKind::kNaN;
  if (tok.front() == '+') tok.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(value)) return TokenKind::kBad;
  return TokenKind::kNumber;
}

}  // namespace

std::size_t RawFlowTable::column_index(std::string_view name) const {
  for (std::size_t c = 0; c < columns.size(); ++c)
    if (columns[c] == name) return c;
  throw SchemaError("raw table has no column '" + std::string(name) + "'");
}

RawFlowTable load_csv(std::span<const std::filesystem::path> paths, const FeatureSchema& schema) {
  RawFlowTable table;
  table.columns = schema.raw_columns();
  const std::size_t ncols = table.columns.size();

  std::vector<bool> is_rate(ncols, false);
  std::vector<bool> is_mf(ncols, false);
  for (std::size_t c = 0; c < ncols; ++c) {
    is_rate[c] = std::find(schema.rate_columns.begin(), schema.rate_columns.end(), table.columns[c]) !=
                 schema.rate_columns.end();
    for (const auto& f : schema.features) {
      if (f.source_column == table.columns[c] && f.group == FeatureGroup::kModified) is_mf[c] = true;
    }
  }

  std::vector<std::vector<std::size_t>> infinite_cells(ncols);
  std::vector<std::string_view> fields;
  std::vector<double> row(ncols);

  for (const auto& path : paths) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open CSV file: " + path.string());
    std::string header;
    if (!std::getline(is, header)) throw SchemaError("CSV file has no header row: " + path.string());

    split_fields(header, fields);
    std::vector<std::string> header_names;
    for (auto f : fields) header_names.emplace_back(trim(f));
    const std::size_t nfields = header_names.size();

    auto position_of = [&](const std::string& name) -> std::size_t {
      for (std::size_t i = 0; i < nfields; ++i)
        if (header_names[i] == name) return i;
      throw SchemaError("CSV " + path.string() + " is missing column '" + name + "'");
    };
    std::vector<std::size_t> positions(ncols);
    for (std::size_t c = 0; c < ncols; ++c) positions[c] = position_of(table.columns[c]);
    const std::size_t label_pos = position_of(schema.label_column);

    std::string line;
    while (std::getline(is, line)) {
      if (trim(line).empty()) continue;
      ++table.counters.rows_read;
      split_fields(line, fields);
      if (fields.size() != nfields) {
        ++table.counters.rows_skipped;
        continue;
      }
      bool bad = false;
      bool invalid = false;
      std::vector<std::size_t> row_infinite;
      for (std::size_t c = 0; c < ncols && !bad; ++c) {
        double v = 0.0;
        switch (parse_token(fields[positions[c]], v)) {
          case TokenKind::kNumber:
            row[c] = v;
            if (is_mf[c] && v < 0.0) invalid = true;
            break;
          case TokenKind::kInfinity:
            if (is_rate[c]) {
              row[c] = std::numeric_limits<double>::infinity();
              row_infinite.push_back(c);
            } else {
              bad = true;
            }
            break;
          case TokenKind::kNaN:
            invalid = true;
            row[c] = 0.0;
            break;
          case TokenKind::kBad:
            bad = true;
            break;
        }
      }
      const std::string_view label = trim(fields[label_pos]);
      if (!bad && (label.empty() || iequals(label, schema.label_column))) bad = true;
      if (bad) {
        ++table.counters.rows_skipped;
        continue;
      }
      if (invalid) {
        ++table.counters.invalid_dropped;
        continue;
      }
      const std::size_t r = table.rows();
      for (std::size_t c : row_infinite) infinite_cells[c].push_back(r);
      table.values.insert(table.values.end(), row.begin(), row.end());
      table.labels.push_back(iequals(label, schema.benign_label) ? 0 : 1);
    }
  }

  if (table.counters.rows_read > 0 &&
      static_cast<double>(table.counters.rows_skipped) > 0.01 * static_cast<double>(table.counters.rows_read)) {
    throw ValidationError("too many malformed CSV rows: " + std::to_string(table.counters.rows_skipped) + " of " +
                          std::to_string(table.counters.rows_read));
  }

  for (std::size_t c = 0; c < ncols; ++c) {
    if (infinite_cells[c].empty()) continue;
    double cap = 0.0;
    bool any = false;
    for (std::size_t r = 0; r < table.rows(); ++r) {
      const double v = table.values[r * ncols + c];
      if (std::isfinite(v) && (!any || v > cap)) {
        cap = v;
        any = true;
      }
    }
    for (std::size_t r : infinite_cells[c]) table.values[r * ncols + c] = cap;
    table.counters.infinity_substituted += infinite_cells[c].size();
  }
  return table;
}

void write_csv(const std::filesystem::path& path, const RawFlowTable& table, const FeatureSchema& schema) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoError("cannot write CSV: " + path.string());
  for (const auto& c : table.columns) os << c << ',';
  os << schema.label_column << '\n';
  char buf[64];
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (double v : table.row(r)) {
      const auto res = std::to_chars(buf, buf + sizeof buf, v);
      os.write(buf, res.ptr - buf);
      os << ',';
    }
    os << (table.labels[r] == 0 ? schema.benign_label : std::string("Attack")) << '\n';
  }
}

std::size_t FlowMatrix::count_label(std::uint8_t label) const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

FlowMatrix FlowMatrix::subset(std::span<const std::size_t> indices) const {
  FlowMatrix out;
  out.n = indices.size();
  out.d = d;
  out.values.reserve(out.n * d);
  out.labels.reserve(out.n);
  for (std::size_t i : indices) {
    const auto r = row(i);
    out.values.insert(out.values.end(), r.begin(), r.end());
    out.labels.push_back(labels[i]);
  }
  return out;
}

FlowMatrix encode(const RawFlowTable& raw, const FeatureSchema& schema) {
  std::vector<std::size_t> source(schema.size());
  for (std::size_t j = 0; j < schema.size(); ++j) source[j] = raw.column_index(schema.features[j].source_column);

  FlowMatrix m;
  m.n = raw.rows();
  m.d = schema.size();
  m.values.resize(m.n * m.d);
  m.labels = raw.labels;
  for (std::size_t i = 0; i < m.n; ++i) {
    const auto in = raw.row(i);
    auto out = m.row(i);
    for (std::size_t j = 0; j < m.d; ++j) {
      const auto& f = schema.features[j];
      const double v = in[source[j]];
      out[j] = f.kind == FeatureKind::kOneHot ? (v == f.category ? 1.0 : 0.0) : v;
    }
  }
  return m;
}

FeatureSchema fit_ranges(const FlowMatrix& encoded, FeatureSchema schema) {
  if (encoded.d != schema.size()) throw SchemaError("fit_ranges: matrix width does not match schema");
  for (std::size_t j = 0; j < schema.size(); ++j) {
    auto& f = schema.features[j];
    if (f.kind == FeatureKind::kOneHot) {
      f.raw_min = 0.0;
      f.raw_max = 1.0;
      continue;
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < encoded.n; ++i) {
      const double v = encoded.values[i * encoded.d + j];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (encoded.n == 0) lo = hi = 0.0;
    f.raw_min = lo;
    f.raw_max = hi;
  }
  schema.fitted = true;
  return schema;
}

FlowDataset normalize(const FlowMatrix& encoded, const FeatureSchema& fitted, NormalizeCounters* counters) {
  if (!fitted.fitted) throw SchemaError("normalize: schema ranges have not been fitted");
  if (encoded.d != fitted.size()) throw SchemaError("normalize: matrix width does not match schema");
  FlowDataset ds{encoded, fitted};
  std::size_t clamped = 0;
  for (std::size_t i = 0; i < ds.data.n; ++i) {
    auto r = ds.data.row(i);
    for (std::size_t j = 0; j < ds.data.d; ++j) {
      double v = fitted.normalize(j, r[j]);
      if (v < 0.0 || v > 1.0) {
        ++clamped;
        v = std::clamp(v, 0.0, 1.0);
      }
      r[j] = v;
    }
  }
  if (counters) counters->clamped += clamped;
  return ds;
}

FlowMatrix denormalize(const FlowDataset& ds) {
  FlowMatrix m = ds.data;
  for (std::size_t i = 0; i < m.n; ++i) {
    auto r = m.row(i);
    for (std::size_t j = 0; j < m.d; ++j) r[j] = ds.schema.denormalize(j, r[j]);
  }
  return m;
}

FlowDataset preprocess(const RawFlowTable& raw, const FeatureSchema& schema, NormalizeCounters* counters) {
  const FlowMatrix encoded = encode(raw, schema);
  const FeatureSchema fitted = schema.fitted ? schema : fit_ranges(encoded, schema);
  return normalize(encoded, fitted, counters);
}

SplitIndices stratified_split_indices(std::span<const std::uint8_t> labels, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("stratified_split: train fraction must lie in (0,1)");
  }
  SplitIndices out;
  for (std::uint8_t cls : {std::uint8_t{0}, std::uint8_t{1}}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == cls) idx.push_back(i);
    if (idx.size() < 2) {
      throw ValidationError("stratified_split: class " + std::to_string(cls) + " has fewer than 2 samples");
    }
    Rng rng = make_rng(seed, "stratified-split", cls);
    std::shuffle(idx.begin(), idx.end(), rng);
    auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(idx.size())));
    n_train = std::clamp<std::size_t>(n_train, 1, idx.size() - 1);
    out.train.insert(out.train.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.test.insert(out.test.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

std::pair<FlowDataset, FlowDataset> stratified_split(const FlowDataset& ds, double train_fraction, std::uint64_t seed) {
  const auto split = stratified_split_indices(ds.data.labels, train_fraction, seed);
  return {ds.subset(split.train), ds.subset(split.test)};
}

std::pair<FlowMatrix, FlowMatrix> stratified_split(const FlowMatrix& m, double train_fraction, std::uint64_t seed) {
  const auto split = stratified_split_indices(m.labels, train_fraction, seed);
  return {m.subset(split.train), m.subset(split.test)};
}

std::vector<std::size_t> undersample_indices(std::span<const std::uint8_t> labels, std::uint64_t seed) {
  std::vector<std::size_t> benign;
  std::vector<std::size_t> attack;
  for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] == 0 ? benign : attack).push_back(i);
  if (benign.size() < attack.size()) {
    throw ValidationError("undersample: benign rows (" + std::to_string(benign.size()) + ") fewer than attack rows (" +
                          std::to_string(attack.size()) + ")");
  }
  Rng rng = make_rng(seed, "undersample");
  std::shuffle(benign.begin(), benign.end(), rng);
  benign.resize(attack.size());
  std::vector<std::size_t> keep = attack;
  keep.insert(keep.end(), benign.begin(), benign.end());
  std::sort(keep.begin(), keep.end());
  return keep;
}

FlowDataset undersample(const FlowDataset& train, std::uint64_t seed) {
  const auto keep = undersample_indices(train.data.labels, seed);
  return train.subset(keep);
}

namespace {
constexpr char kDatasetMagic[8] = {'U', 'A', 'P', 'I', 'D', 'S', 'D', 'S'};
constexpr std::uint32_t kDatasetVersion = 1;
}  // namespace

void save_dataset(const std::filesystem::path& path, const FlowDataset& ds) {
  const nlohmann::json header{{"schema", ds.schema.to_json()}, {"rows", ds.data.n}, {"cols", ds.data.d}};
  const std::string text = header.dump();
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot write dataset: " + path.string());
  os.write(kDatasetMagic, sizeof kDatasetMagic);
  binio::write_u32(os, kDatasetVersion);
  binio::write_u64(os, text.size());
  os.write(text.data(), static_cast<std::streamsize>(text.size()));
  os.write(reinterpret_cast<const char*>(ds.data.labels.data()), static_cast<std::streamsize>(ds.data.labels.size()));
  binio::write_doubles(os, ds.data.values.data(), ds.data.values.size());
  if (!os) throw IoError("failed writing dataset: " + path.string());
}

FlowDataset load_dataset(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open dataset: " + path.string());
  char magic[8];
  if (!is.read(magic, sizeof magic) || std::memcmp(magic, kDatasetMagic, sizeof magic) != 0) {
    throw IoError("not a uapids dataset file: " + path.string());
  }
  const std::uint32_t version = binio::read_u32(is);
  if (version != kDatasetVersion) throw IoError("unsupported dataset version " + std::to_string(version));
  const std::uint64_t len = binio::read_u64(is);
  std::string text(len, '\0');
  if (!is.read(text.data(), static_cast<std::streamsize>(len))) throw IoError("truncated dataset header");
  const auto header = nlohmann::json::parse(text);

  FlowDataset ds;
  ds.schema = FeatureSchema::from_json(header.at("schema"));
  ds.data.n = header.at("rows").get<std::size_t>();
  ds.data.d = header.at("cols").get<std::size_t>();
  if (ds.data.d != ds.schema.size()) throw SchemaError("dataset width does not match embedded schema");
  ds.data.labels.resize(ds.data.n);
  if (!is.read(reinterpret_cast<char*>(ds.data.labels.data()), static_cast<std::streamsize>(ds.data.n))) {
    throw IoError("truncated dataset labels");
  }
  ds.data.values.resize(ds.data.n * ds.data.d);
  binio::read_doubles(is, ds.data.values.data(), ds.data.values.size());
  return ds;
}

}  // namespace uapids
