#pragma once

// Domain constraints on adversarial flow records.
//
//  * MF (modified) features: free to move, but clamped to the fitted range,
//    i.e. [0,1] in normalized coordinates.
//  * RF (related) features: never perturbed directly; recomputed from the
//    perturbed MF values with the flow formulas below, evaluated in raw units.
//  * UF (unmodified) features: restored to the original record.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "uapids/schema.hpp"

namespace uapids {

using RawMf = std::array<double, kNumMfRoles>;       // indexed by MfRole
using RawRf = std::array<double, kNumFormulas>;      // indexed by RecalcFormula

// Flow durations below this (microseconds) are floored before computing rates.
inline constexpr double kMinFlowDurationUs = 1.0;

// Guard added before floor() in Down/Up Ratio so that a ratio such as
// 20/10 reconstructed through min-max normalization as 1.9999999999999998
// still yields 2.
inline constexpr double kFloorGuard = 1e-9;

// Throws ValidationError for negative or non-finite MF values.
RawRf recalc_related(const RawMf& raw_mf);
double recalc_formula(RecalcFormula formula, const RawMf& raw_mf);

struct FeatureGroups {
  std::vector<std::size_t> mf;
  std::vector<std::size_t> rf;
  std::vector<std::size_t> uf;

  static FeatureGroups from_schema(const FeatureSchema& schema);
};

// 1 at MF indices, 0 elsewhere.
std::vector<double> perturbation_mask(const FeatureSchema& schema);

struct ConstraintStats {
  std::size_t rf_clamped = 0;  // recomputed RF values outside the fitted range
  std::size_t mf_clamped = 0;  // candidate MF values outside [0,1]
};

// Precomputes index tables from a schema; apply() is const and thread-safe.
class ConstraintEngine {
 public:
  explicit ConstraintEngine(FeatureSchema schema);

  const FeatureSchema& schema() const { return schema_; }
  const FeatureGroups& groups() const { return groups_; }
  const std::vector<double>& mask() const { return mask_; }
  std::size_t dim() const { return schema_.size(); }

  // MF from `candidate` clamped to [0,1], RF recomputed in raw space and
  // renormalized (clamped to [0,1]), UF copied from `original`. `out` may alias
  // `candidate` but not `original`.
  void apply(std::span<const double> original, std::span<const double> candidate, std::span<double> out,
             ConstraintStats* stats = nullptr) const;

  std::vector<double> apply(std::span<const double> original, std::span<const double> candidate,
                            ConstraintStats* stats = nullptr) const;

  // Raw MF values of a normalized row (clamped to >= 0, duration not floored).
  RawMf raw_mf(std::span<const double> normalized_row) const;

 private:
  FeatureSchema schema_;
  FeatureGroups groups_;
  std::vector<double> mask_;
  std::array<std::size_t, kNumMfRoles> mf_index_{};
  std::vector<std::pair<std::size_t, RecalcFormula>> rf_rules_;
};

std::vector<double> apply_constraints(std::span<const double> original, std::span<const double> candidate,
                                      const FeatureSchema& schema);

}  // namespace uapids
