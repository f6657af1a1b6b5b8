#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "uapids/schema.hpp"

namespace uapids {

struct LoadCounters {
  std::size_t rows_read = 0;      // data rows seen (header excluded)
  std::size_t rows_skipped = 0;   // malformed rows
  std::size_t invalid_dropped = 0;  // rows with NaN, or a negative MF value
  std::size_t infinity_substituted = 0;
};

// Raw flow records restricted to the schema's source columns, in raw units.
struct RawFlowTable {
  std::vector<std::string> columns;
  std::vector<double> values;  // row-major rows() x columns.size()
  std::vector<std::uint8_t> labels;
  LoadCounters counters;

  std::size_t rows() const { return labels.size(); }
  std::span<const double> row(std::size_t i) const {
    return {values.data() + i * columns.size(), columns.size()};
  }
  std::size_t column_index(std::string_view name) const;
};

// Parses CICFlowMeter-style CSVs. "Infinity"/"inf" in a rate column is replaced
// by that column's largest finite value; rows with NaN or negative MF values are dropped; malformed
// rows are skipped and counted. More than 1% malformed rows is a hard error.
RawFlowTable load_csv(std::span<const std::filesystem::path> paths, const FeatureSchema& schema);

// Writes the table back as CSV (label column rendered as benign label / "Attack").
void write_csv(const std::filesystem::path& path, const RawFlowTable& table, const FeatureSchema& schema);

// Dense N x d matrix of model features plus binary labels (0 benign, 1 attack).
struct FlowMatrix {
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<double> values;
  std::vector<std::uint8_t> labels;

  std::span<const double> row(std::size_t i) const { return {values.data() + i * d, d}; }
  std::span<double> row(std::size_t i) { return {values.data() + i * d, d}; }

  std::size_t count_label(std::uint8_t label) const;
  FlowMatrix subset(std::span<const std::size_t> indices) const;
};

// Normalized dataset in [0,1]^d together with its fitted schema.
struct FlowDataset {
  FlowMatrix data;
  FeatureSchema schema;

  std::size_t size() const { return data.n; }
  FlowDataset subset(std::span<const std::size_t> indices) const { return {data.subset(indices), schema}; }
};

// One-hot expansion into the schema's feature order, still in raw units.
FlowMatrix encode(const RawFlowTable& raw, const FeatureSchema& schema);

// Fits raw_min/raw_max of every numeric feature on `encoded`; one-hot columns are [0,1].
FeatureSchema fit_ranges(const FlowMatrix& encoded, FeatureSchema schema);

struct NormalizeCounters {
  std::size_t clamped = 0;  // values outside the fitted range at transform time
};

FlowDataset normalize(const FlowMatrix& encoded, const FeatureSchema& fitted, NormalizeCounters* counters = nullptr);

// Raw-unit reconstruction of a normalized matrix.
FlowMatrix denormalize(const FlowDataset& ds);

// encode + (fit if the schema is unfitted) + normalize.
FlowDataset preprocess(const RawFlowTable& raw, const FeatureSchema& schema, NormalizeCounters* counters = nullptr);

// Per-class shuffled split; train/test keep original row order.
struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};
SplitIndices stratified_split_indices(std::span<const std::uint8_t> labels, double train_fraction, std::uint64_t seed);

std::pair<FlowDataset, FlowDataset> stratified_split(const FlowDataset& ds, double train_fraction, std::uint64_t seed);
std::pair<FlowMatrix, FlowMatrix> stratified_split(const FlowMatrix& m, double train_fraction, std::uint64_t seed);

// Randomly drops benign rows until both classes have the attack count.
std::vector<std::size_t> undersample_indices(std::span<const std::uint8_t> labels, std::uint64_t seed);
FlowDataset undersample(const FlowDataset& train, std::uint64_t seed);

// Versioned binary dataset file with the fitted schema embedded as JSON.
void save_dataset(const std::filesystem::path& path, const FlowDataset& ds);
FlowDataset load_dataset(const std::filesystem::path& path);

}  // namespace uapids
