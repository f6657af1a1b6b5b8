#pragma once

// Experiment grid: attack x loss x epsilon x run. Per-input attacks (fgsm,
// bim and their unconstrained _nc variants) perturb the malicious test rows
// once per epsilon; UAP cells generate `runs` perturbations on the training
// set and apply each to every test row.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "uapids/attacks.hpp"
#include "uapids/constraints.hpp"
#include "uapids/flow_data.hpp"
#include "uapids/losses.hpp"
#include "uapids/qnetwork.hpp"
#include "uapids/uap.hpp"

namespace uapids {

enum class SweepAttack { kFgsm, kBim, kFgsmNc, kBimNc, kUap };
std::string_view to_string(SweepAttack a);
SweepAttack parse_sweep_attack(std::string_view s);
inline constexpr SweepAttack kAllSweepAttacks[] = {SweepAttack::kFgsm, SweepAttack::kBim, SweepAttack::kFgsmNc,
                                                   SweepAttack::kBimNc, SweepAttack::kUap};

// "a:b:n" -> n evenly spaced points from a to b; or a comma list.
std::vector<double> parse_grid(std::string_view spec);

struct SweepConfig {
  std::vector<double> grid = parse_grid("0:0.04:17");
  std::vector<SweepAttack> attacks{std::begin(kAllSweepAttacks), std::end(kAllSweepAttacks)};
  std::vector<LossKind> uap_losses{std::begin(kAllLossKinds), std::end(kAllLossKinds)};
  int runs = 80;
  std::uint64_t seed = 0;
  int jobs = 1;
  int metric_layer = kOutputLayer;  // layer read by PCC_x / PCC_pertu
  int loss_layer = 0;               // UAP loss layer override; 0 = loss default
  double seed_fraction = 0.001;
  double delta_target = 0.2;
  int max_iter = 10;
  int bim_steps = 20;
  int bim_max_iter = 100;

  void validate() const;
};

struct MetricsRecord {
  std::string attack;
  std::string loss;
  double epsilon = 0.0;
  int run = 0;
  bool is_mean = false;
  double accuracy = 0.0;               // every row the attack perturbs, perturbed
  double accuracy_benign_clean = 0.0;  // benign rows always clean
  std::optional<double> fnr;
  double fooling_rate = 0.0;                // label change over the perturbed test rows
  std::optional<double> fooling_rate_train; // UAP only: last generation pass
  std::optional<double> pcc_x;
  std::optional<double> pcc_pertu;
  double pcc_skipped = 0.0;
  double tp = 0, tn = 0, fp = 0, fn = 0;
  std::optional<double> uap_iterations;
};

struct SweepInputs {
  const QNetwork* net = nullptr;
  const FlowDataset* train = nullptr;  // UAP generation set
  const FlowDataset* test = nullptr;
};

// Per-run rows followed by one mean row per cell, sorted by
// (attack, loss, epsilon, run) with the mean row last in its cell.
std::vector<MetricsRecord> run_sweep(const SweepConfig& cfg, const SweepInputs& in);

// Mean row over per-run rows of one cell; optionals average their defined values.
MetricsRecord aggregate(const std::vector<MetricsRecord>& runs);

std::string metrics_csv(const std::vector<MetricsRecord>& records);
nlohmann::json summary_json(const std::vector<MetricsRecord>& records);
// attack,loss,epsilon,metric,mean,std,n
std::string long_csv(const std::vector<MetricsRecord>& records);

// Single evaluation helpers, also used by the CLI.
MetricsRecord evaluate_per_input(SweepAttack attack, double eps, const SweepConfig& cfg, const QNetwork& net,
                                 const FlowMatrix& test, const ConstraintEngine& engine);
MetricsRecord evaluate_uap(const UapResult& uap, const SweepConfig& cfg, const QNetwork& net, const FlowMatrix& test,
                           const ConstraintEngine& engine);

}  // namespace uapids
