#pragma once

// Detection metrics with Attack as the positive class, and PCC contribution
// diagnostics between clean, perturbation and adversarial activations.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "uapids/constraints.hpp"
#include "uapids/flow_data.hpp"
#include "uapids/kernels.hpp"
#include "uapids/qnetwork.hpp"

namespace uapids {

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + tn + fp + fn; }
  bool operator==(const ConfusionCounts&) const = default;
};

// Throws ValidationError on length mismatch, empty input or non-binary values.
ConfusionCounts confusion(std::span<const int> preds, std::span<const std::uint8_t> labels);

struct AccuracyFnr {
  double accuracy = 0.0;
  std::optional<double> fnr;  // empty when there are no positives
};

AccuracyFnr accuracy_fnr(const ConfusionCounts& c);

struct PccSummary {
  std::optional<double> mean_pcc_x;
  std::optional<double> mean_pcc_pertu;
  std::size_t rows = 0;
  std::size_t skipped = 0;  // rows where either PCC is undefined
};

// Means over rows where both PCC values are defined.
PccSummary summarize_pcc(std::span<const kernels::PccRow> rows);

// Universal delta: activation(delta) once, activation(x) and
// activation(apply_constraints(x, x + delta)) per row.
PccSummary pcc_metrics(const QNetwork& net, const FlowMatrix& data, std::span<const double> delta,
                       const ConstraintEngine& engine, int layer = kOutputLayer);

}  // namespace uapids
