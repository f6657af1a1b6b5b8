#pragma once

// Generation losses shared by the per-input attacks and the UAP generator.
//
//   ce          cross-entropy of softmax(Q(x_adv)) against the target label   (minimised)
//   pcc_pertu   PCC(a_l(x_adv), a_l(delta)), delta evaluated as its own input  (maximised)
//   pd_mean     sum_i log(mean(a_i(x_adv)) + 1e-8) over the hidden layers       (maximised)
//   pd_l2       sum_i log(||a_i(x_adv)||_2 + 1e-8)                              (maximised)
//   cossim_l3   -cos(a_3(x_adv), a_3(x_clean))                                  (maximised)
//   cossim_l4   -cos(a_4(x_adv), a_4(x_clean))                                  (maximised)
//
// Gradients are taken w.r.t. x_adv only; a(delta) and a(x_clean) are constants.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "uapids/errors.hpp"
#include "uapids/qnetwork.hpp"

namespace uapids {

enum class LossKind { kCrossEntropy, kPccPertu, kPdMean, kPdL2, kCossimL3, kCossimL4 };

inline constexpr LossKind kAllLossKinds[] = {LossKind::kCrossEntropy, LossKind::kPccPertu, LossKind::kPdMean,
                                             LossKind::kPdL2,         LossKind::kCossimL3, LossKind::kCossimL4};

std::string_view to_string(LossKind kind);
LossKind parse_loss_kind(std::string_view name);

// -1: the attack steps against the gradient (minimise); +1: along it (maximise).
int loss_direction(LossKind kind);

// Layer the loss reads when LossContext::layer is 0.
int default_layer(LossKind kind);

inline constexpr double kPdEps = 1e-8;

class DegenerateGradient : public Error {
 public:
  DegenerateGradient(LossKind kind, const std::string& what) : Error(what), kind_(kind) {}
  LossKind kind() const { return kind_; }

 private:
  LossKind kind_;
};

struct LossContext {
  int target_label = 0;
  std::span<const double> clean;  // cossim reference input
  std::span<const double> delta;  // pcc_pertu perturbation input
  int layer = 0;                  // 1..4 hidden, 5 = Q-output; 0 = loss default
  std::vector<int> pd_layers{1, 2, 3, 4};
};

struct LossEval {
  double value = 0.0;
  std::vector<double> grad;  // dJ/dx_adv
};

// Throws DegenerateGradient for undefined PCC/cosine terms or non-finite gradients.
LossEval evaluate_loss(const QNetwork& net, std::span<const double> x_adv, LossKind kind, const LossContext& ctx);

// Value only; used by finite-difference checks and diagnostics.
double loss_value(const QNetwork& net, std::span<const double> x_adv, LossKind kind, const LossContext& ctx);

// Convenience form: evaluates at x + delta with x as the clean reference.
LossEval loss_and_input_grad(const QNetwork& net, std::span<const double> x, std::span<const double> delta,
                             LossKind kind, int target_label);

// dJ/dx at x itself (delta = 0 unless ctx.delta is set).
std::vector<double> input_gradient(const QNetwork& net, std::span<const double> x, LossKind kind,
                                   const LossContext& ctx);

}  // namespace uapids
