#pragma once

// Synthetic CICFlowMeter-like flows for desk-scale experiments. MF columns are
// class-conditional log-normal draws (integer packet counts), RF columns are
// computed from them with the recalculation formulas, and UF columns are weakly
// class-dependent noise. `separation` scales every class difference; at 0 the
// two classes are identically distributed.

#include <cstddef>
#include <cstdint>

#include "uapids/flow_data.hpp"
#include "uapids/schema.hpp"

namespace uapids {

struct SynthConfig {
  std::size_t n_benign = 2500;
  std::size_t n_attack = 1500;
  double separation = 3.0;
  std::uint64_t seed = 1;

  void validate() const;
};

RawFlowTable synth_generate(const SynthConfig& cfg, const FeatureSchema& schema = FeatureSchema::cicids2018());

}  // namespace uapids
