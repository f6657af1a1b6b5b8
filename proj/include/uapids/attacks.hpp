#pragma once

// Targeted gradient-sign attacks (FGSM, BIM) toward the benign label.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "uapids/constraints.hpp"
#include "uapids/losses.hpp"
#include "uapids/qnetwork.hpp"

namespace uapids {

struct AttackConfig {
  double epsilon = 0.0;  // L-inf budget in normalized coordinates
  int target_label = 0;
  int bim_steps = 20;  // step size alpha = epsilon / bim_steps
  int bim_max_iter = 100;
  bool constrained = true;  // MF mask + range clamp + RF recalculation
  LossKind loss = LossKind::kCrossEntropy;

  double alpha() const { return bim_steps > 0 ? epsilon / bim_steps : 0.0; }
  void validate() const;
};

enum class AttackMethod { kFgsm, kBim };
std::string_view to_string(AttackMethod m);
AttackMethod parse_attack_method(std::string_view s);

struct Perturbation {
  std::vector<double> delta;
  double epsilon_budget = 0.0;
  std::vector<double> mask;
};

// Sign step: direction * eps * sign(mask (.) grad), with sign(0) = 0.
std::vector<double> sign_step(std::span<const double> grad, std::span<const double> mask, double eps, int direction);

// Unclamped FGSM candidate perturbation at x (masked when constrained).
std::vector<double> fgsm_delta(const QNetwork& net, std::span<const double> x, const AttackConfig& cfg,
                               const ConstraintEngine& engine);

// Maps a candidate onto the feasible set: apply_constraints when constrained,
// otherwise a plain [0,1] box clamp.
std::vector<double> project_feasible(std::span<const double> x, std::span<const double> candidate,
                                     const AttackConfig& cfg, const ConstraintEngine& engine);

std::vector<double> fgsm_targeted(const QNetwork& net, std::span<const double> x, const AttackConfig& cfg,
                                  const ConstraintEngine& engine);

struct BimResult {
  std::vector<double> adversarial;
  int iterations = 0;
};

BimResult bim_targeted(const QNetwork& net, std::span<const double> x, const AttackConfig& cfg,
                       const ConstraintEngine& engine);

std::vector<double> run_attack(AttackMethod method, const QNetwork& net, std::span<const double> x,
                               const AttackConfig& cfg, const ConstraintEngine& engine);

}  // namespace uapids
