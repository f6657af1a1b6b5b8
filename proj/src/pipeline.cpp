#include "uapids/pipeline.hpp"

#include <vector>

#include "uapids/rng.hpp"

namespace uapids {

void canonicalize(FlowDataset& ds, const ConstraintEngine& engine, ConstraintStats* stats) {
  std::vector<double> orig(ds.data.d);
  for (std::size_t i = 0; i < ds.data.n; ++i) {
    auto row = ds.data.row(i);
    orig.assign(row.begin(), row.end());
    engine.apply(orig, orig, row, stats);
  }
}

PreparedData prepare_datasets(const RawFlowTable& raw, const FeatureSchema& profile, const PrepareConfig& cfg) {
  profile.validate();
  const FlowMatrix encoded = encode(raw, profile);
  const auto split = stratified_split_indices(encoded.labels, cfg.train_fraction, derive_seed(cfg.seed, "split"));
  const FlowMatrix train_raw = encoded.subset(split.train);
  const FlowMatrix test_raw = encoded.subset(split.test);
  const FeatureSchema fitted = profile.fitted ? profile : fit_ranges(train_raw, profile);

  PreparedData p;
  p.train = normalize(train_raw, fitted, &p.train_clamped);
  p.test = normalize(test_raw, fitted, &p.test_clamped);
  const ConstraintEngine engine(fitted);
  canonicalize(p.train, engine, &p.canonicalized);
  canonicalize(p.test, engine, &p.canonicalized);
  p.balanced = undersample(p.train, derive_seed(cfg.seed, "undersample"));
  return p;
}

}  // namespace uapids
