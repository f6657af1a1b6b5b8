#pragma once

// Raw table -> normalized train/test/balanced-train datasets.
//
// Order: encode, stratified split, fit min/max on the train split, normalize
// both splits, make every row consistent with the recalculation formulas
// (apply_constraints(x, x)), then undersample benign train rows.

#include <cstdint>

#include "uapids/constraints.hpp"
#include "uapids/flow_data.hpp"
#include "uapids/schema.hpp"

namespace uapids {

struct PreparedData {
  FlowDataset train;     // full training split
  FlowDataset test;
  FlowDataset balanced;  // undersampled training split
  NormalizeCounters train_clamped;
  NormalizeCounters test_clamped;
  ConstraintStats canonicalized;  // RF values clamped while making rows consistent
};

struct PrepareConfig {
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
};

PreparedData prepare_datasets(const RawFlowTable& raw, const FeatureSchema& profile, const PrepareConfig& cfg);

// In-place apply_constraints(x, x) on every row.
void canonicalize(FlowDataset& ds, const ConstraintEngine& engine, ConstraintStats* stats = nullptr);

}  // namespace uapids
