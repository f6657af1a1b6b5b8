#include "uapids/attacks.hpp"

#include <algorithm>
#include <cmath>

#include "uapids/errors.hpp"

namespace uapids {

void AttackConfig::validate() const {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw ConfigError("attack epsilon must be finite and >= 0");
  if (bim_steps <= 0) throw ConfigError("bim_steps must be positive");
  if (bim_max_iter < 0) throw ConfigError("bim_max_iter must be >= 0");
  if (target_label != 0 && target_label != 1) throw ConfigError("target label must be 0 or 1");
}

std::string_view to_string(AttackMethod m) { return m == AttackMethod::kFgsm ? "fgsm" : "bim"; }

AttackMethod parse_attack_method(std::string_view s) {
  if (s == "fgsm") return AttackMethod::kFgsm;
  if (s == "bim") return AttackMethod::kBim;
  throw ConfigError("unknown attack method '" + std::string(s) + "' (expected fgsm|bim)");
}

std::vector<double> sign_step(std::span<const double> grad, std::span<const double> mask, double eps, int direction) {
  std::vector<double> step(grad.size(), 0.0);
  for (std::size_t i = 0; i < grad.size(); ++i) {
    const double g = grad[i] * mask[i];
    if (g > 0.0) step[i] = direction * eps;
    else if (g < 0.0) step[i] = -direction * eps;
  }
  return step;
}

namespace {

const std::vector<double>& attack_mask(const AttackConfig& cfg, const ConstraintEngine& engine,
                                       const std::vector<double>& all_ones) {
  return cfg.constrained ? engine.mask() : all_ones;
}

LossContext make_context(const AttackConfig& cfg, std::span<const double> clean, std::span<const double> delta) {
  LossContext ctx;
  ctx.target_label = cfg.target_label;
  ctx.clean = clean;
  ctx.delta = delta;
  return ctx;
}

}  // namespace

std::vector<double> fgsm_delta(const QNetwork& net, std::span<const double> x, const AttackConfig& cfg,
                               const ConstraintEngine& engine) {
  cfg.validate();
  const std::vector<double> ones(x.size(), 1.0);
  const std::vector<double> zero(x.size(), 0.0);
  const LossEval eval = evaluate_loss(net, x, cfg.loss, make_context(cfg, x, zero));
  return sign_step(eval.grad, attack_mask(cfg, engine, ones), cfg.epsilon, loss_direction(cfg.loss));
}

std::vector<double> project_feasible(std::span<const double> x, std::span<const double> candidate,
                                     const AttackConfig& cfg, const ConstraintEngine& engine) {
  if (cfg.constrained) return engine.apply(x, candidate);
  std::vector<double> out(candidate.begin(), candidate.end());
  for (double& v : out) v = std::clamp(v, 0.0, 1.0);
  return out;
}

std::vector<double> fgsm_targeted(const QNetwork& net, std::span<const double> x, const AttackConfig& cfg,
                                  const ConstraintEngine& engine) {
  std::vector<double> delta;
  try {
    delta = fgsm_delta(net, x, cfg, engine);
  } catch (const DegenerateGradient&) {
    delta.assign(x.size(), 0.0);
  }
  std::vector<double> cand(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) cand[i] = x[i] + delta[i];
  return project_feasible(x, cand, cfg, engine);
}

BimResult bim_targeted(const QNetwork& net, std::span<const double> x, const AttackConfig& cfg,
                       const ConstraintEngine& engine) {
  cfg.validate();
  BimResult res;
  res.adversarial = project_feasible(x, x, cfg, engine);
  if (cfg.epsilon == 0.0) return res;

  const std::size_t d = x.size();
  const std::vector<double> ones(d, 1.0);
  const auto& mask = attack_mask(cfg, engine, ones);
  const double alpha = cfg.alpha();
  const int direction = loss_direction(cfg.loss);
  std::vector<double> delta(d, 0.0);
  std::vector<double> cand(d);

  for (int it = 1; it <= cfg.bim_max_iter; ++it) {
    std::vector<double> step;
    try {
      const LossEval eval = evaluate_loss(net, res.adversarial, cfg.loss, make_context(cfg, x, delta));
      step = sign_step(eval.grad, mask, alpha, direction);
    } catch (const DegenerateGradient&) {
      break;
    }
    for (std::size_t i = 0; i < d; ++i) {
      delta[i] = std::clamp(delta[i] + step[i], -cfg.epsilon, cfg.epsilon);
      cand[i] = x[i] + delta[i];
    }
    res.adversarial = project_feasible(x, cand, cfg, engine);
    // Keep delta consistent with what survived the range clamp.
    for (std::size_t i = 0; i < d; ++i) delta[i] = mask[i] != 0.0 ? res.adversarial[i] - x[i] : 0.0;
    res.iterations = it;
    if (predict(net, res.adversarial) == cfg.target_label) break;
  }
  return res;
}

std::vector<double> run_attack(AttackMethod method, const QNetwork& net, std::span<const double> x,
                               const AttackConfig& cfg, const ConstraintEngine& engine) {
  if (method == AttackMethod::kFgsm) return fgsm_targeted(net, x, cfg, engine);
  return bim_targeted(net, x, cfg, engine).adversarial;
}

}  // namespace uapids
