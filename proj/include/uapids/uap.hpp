#pragma once

// Universal adversarial perturbation generation.
//
// A seedset (a small random fraction of the training set) is drawn once. Each
// outer iteration shuffles it and, for every seed the current UAP does not yet
// fool, takes one full-budget targeted sign step with the configured loss at
// the constrained point seed+uap, adds the MF part of that step to the UAP and
// projects back onto the L-inf ball. After each pass the fooling rate (label
// change under the constrained UAP) is measured on the whole training set and
// the loop stops once it reaches 1 - delta_target or max_iter passes are done.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "uapids/attacks.hpp"
#include "uapids/constraints.hpp"
#include "uapids/flow_data.hpp"
#include "uapids/losses.hpp"
#include "uapids/qnetwork.hpp"

namespace uapids {

struct UapConfig {
  double seed_fraction = 0.001;
  double delta_target = 0.2;  // stop when fooling rate >= 1 - delta_target
  int max_iter = 10;
  double epsilon = 0.04;
  LossKind loss = LossKind::kCrossEntropy;
  int layer = 0;  // loss layer override; 0 = loss default
  int target_label = 0;
  std::uint64_t seed = 0;

  void validate() const;
  std::size_t seedset_size(std::size_t train_rows) const;
};

struct UapResult {
  Perturbation uap;
  std::vector<double> fooling_rate_history;
  int iterations_used = 0;
  std::vector<std::size_t> seedset;
  std::size_t degenerate_skips = 0;
  UapConfig config;

  double final_fooling_rate() const { return fooling_rate_history.empty() ? 0.0 : fooling_rate_history.back(); }
};

// Coordinate-wise clamp to [-eps, eps].
std::vector<double> project_linf(std::span<const double> v, double eps);

// Row-wise apply_constraints(row, row + uap).
FlowDataset apply_uap(const FlowDataset& ds, std::span<const double> uap, const ConstraintEngine& engine);

// Fraction of rows whose predicted label changes under the constrained UAP.
double fooling_rate(const QNetwork& net, const FlowDataset& ds, std::span<const double> uap,
                    const ConstraintEngine& engine);

UapResult generate_uap(const QNetwork& net, const FlowDataset& train, const UapConfig& cfg,
                       const ConstraintEngine& engine);

// JSON document: perturbation, config echo, history, seedset.
void save_uap(const std::filesystem::path& path, const UapResult& result);
UapResult load_uap(const std::filesystem::path& path);

}  // namespace uapids
