#include "uapids/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "uapids/errors.hpp"

namespace uapids {

double recalc_formula(RecalcFormula formula, const RawMf& m) {
  const double tot_fwd = m[static_cast<std::size_t>(MfRole::kTotFwdPkts)];
  const double tot_bwd = m[static_cast<std::size_t>(MfRole::kTotBwdPkts)];
  const double len_fwd = m[static_cast<std::size_t>(MfRole::kTotLenFwdPkts)];
  const double len_bwd = m[static_cast<std::size_t>(MfRole::kTotLenBwdPkts)];
  const double duration = std::max(m[static_cast<std::size_t>(MfRole::kFlowDuration)], kMinFlowDurationUs);

  switch (formula) {
    case RecalcFormula::kFwdPktsPerSec:
      return tot_fwd * 1e6 / duration;
    case RecalcFormula::kBwdPktsPerSec:
      return tot_bwd * 1e6 / duration;
    case RecalcFormula::kFlowPktsPerSec:
      return tot_fwd * 1e6 / duration + tot_bwd * 1e6 / duration;
    case RecalcFormula::kFlowBytesPerSec:
      return (len_fwd + len_bwd) * 1e6 / duration;
    case RecalcFormula::kPktSizeAvg:
      return tot_fwd + tot_bwd > 0.0 ? (len_fwd + len_bwd) / (tot_fwd + tot_bwd) : 0.0;
    case RecalcFormula::kFwdSegSizeAvg:
      return tot_fwd > 0.0 ? len_fwd / tot_fwd : 0.0;
    case RecalcFormula::kBwdSegSizeAvg:
      return tot_bwd > 0.0 ? len_bwd / tot_bwd : 0.0;
    case RecalcFormula::kDownUpRatio:
      return tot_fwd > 0.0 ? std::floor(tot_bwd / tot_fwd + kFloorGuard) : 0.0;
  }
  return 0.0;
}

RawRf recalc_related(const RawMf& raw_mf) {
  for (std::size_t r = 0; r < kNumMfRoles; ++r) {
    if (!std::isfinite(raw_mf[r]) || raw_mf[r] < 0.0) {
      throw ValidationError("recalc_related: " + std::string(to_string(static_cast<MfRole>(r))) +
                            " must be finite and non-negative");
    }
  }
  RawRf out{};
  for (std::size_t k = 0; k < kNumFormulas; ++k) out[k] = recalc_formula(static_cast<RecalcFormula>(k), raw_mf);
  return out;
}

FeatureGroups FeatureGroups::from_schema(const FeatureSchema& schema) {
  FeatureGroups g;
  for (std::size_t j = 0; j < schema.size(); ++j) {
    switch (schema.features[j].group) {
      case FeatureGroup::kModified: g.mf.push_back(j); break;
      case FeatureGroup::kRelated: g.rf.push_back(j); break;
      case FeatureGroup::kUnmodified: g.uf.push_back(j); break;
    }
  }
  return g;
}

std::vector<double> perturbation_mask(const FeatureSchema& schema) {
  std::vector<double> mask(schema.size(), 0.0);
  for (std::size_t j = 0; j < schema.size(); ++j)
    if (schema.features[j].group == FeatureGroup::kModified) mask[j] = 1.0;
  return mask;
}

ConstraintEngine::ConstraintEngine(FeatureSchema schema)
    : schema_(std::move(schema)), groups_(FeatureGroups::from_schema(schema_)), mask_(perturbation_mask(schema_)) {
  std::array<bool, kNumMfRoles> seen{};
  for (std::size_t j : groups_.mf) {
    const auto role = static_cast<std::size_t>(*schema_.features[j].role);
    mf_index_[role] = j;
    seen[role] = true;
  }
  for (std::size_t j : groups_.rf) rf_rules_.emplace_back(j, *schema_.features[j].formula);
  if (!rf_rules_.empty() && !std::all_of(seen.begin(), seen.end(), [](bool b) { return b; })) {
    throw SchemaError("constraint engine: RF recalculation needs all five MF roles");
  }
}

RawMf ConstraintEngine::raw_mf(std::span<const double> row) const {
  RawMf m{};
  for (std::size_t r = 0; r < kNumMfRoles; ++r) {
    m[r] = std::max(0.0, schema_.denormalize(mf_index_[r], row[mf_index_[r]]));
  }
  return m;
}

void ConstraintEngine::apply(std::span<const double> original, std::span<const double> candidate, std::span<double> out,
                             ConstraintStats* stats) const {
  const std::size_t d = schema_.size();
  if (original.size() != d || candidate.size() != d || out.size() != d) {
    throw SchemaError("apply_constraints: vectors have " + std::to_string(candidate.size()) +
                      " coordinates, schema has " + std::to_string(d));
  }
  std::size_t mf_clamped = 0;
  std::size_t rf_clamped = 0;
  for (std::size_t j : groups_.uf) out[j] = original[j];
  for (std::size_t j : groups_.mf) {
    const double v = candidate[j];
    if (v < 0.0 || v > 1.0) ++mf_clamped;
    out[j] = std::clamp(v, 0.0, 1.0);
  }
  if (!rf_rules_.empty()) {
    const RawMf m = raw_mf(out);
    for (const auto& [j, formula] : rf_rules_) {
      const double v = schema_.normalize(j, recalc_formula(formula, m));
      if (v < 0.0 || v > 1.0) ++rf_clamped;
      out[j] = std::clamp(v, 0.0, 1.0);
    }
  }
  if (stats) {
    stats->mf_clamped += mf_clamped;
    stats->rf_clamped += rf_clamped;
  }
}

std::vector<double> ConstraintEngine::apply(std::span<const double> original, std::span<const double> candidate,
                                            ConstraintStats* stats) const {
  std::vector<double> out(schema_.size());
  apply(original, candidate, out, stats);
  return out;
}

std::vector<double> apply_constraints(std::span<const double> original, std::span<const double> candidate,
                                      const FeatureSchema& schema) {
  return ConstraintEngine(schema).apply(original, candidate);
}

}  // namespace uapids
