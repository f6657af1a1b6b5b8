#include "uapids/losses.hpp"

#include <cmath>
#include <numeric>

#include "uapids/correlation.hpp"

namespace uapids {

std::string_view to_string(LossKind kind) {
  switch (kind) {
    case LossKind::kCrossEntropy: return "ce";
    case LossKind::kPccPertu: return "pcc_pertu";
    case LossKind::kPdMean: return "pd_mean";
    case LossKind::kPdL2: return "pd_l2";
    case LossKind::kCossimL3: return "cossim_l3";
    case LossKind::kCossimL4: return "cossim_l4";
  }
  return "ce";
}

LossKind parse_loss_kind(std::string_view name) {
  for (LossKind k : kAllLossKinds)
    if (to_string(k) == name) return k;
  throw ConfigError("unknown loss kind '" + std::string(name) +
                    "' (expected ce|pcc_pertu|pd_mean|pd_l2|cossim_l3|cossim_l4)");
}

int loss_direction(LossKind kind) { return kind == LossKind::kCrossEntropy ? -1 : +1; }

int default_layer(LossKind kind) {
  switch (kind) {
    case LossKind::kCrossEntropy: return kOutputLayer;
    case LossKind::kCossimL3: return 3;
    default: return 4;
  }
}

namespace {

void check_layer(int layer) {
  if (layer < 1 || layer > kOutputLayer) throw ConfigError("loss layer must be in 1..5");
}

void add_seed(ActivationSeed& seed, int layer, std::span<const double> g, double scale) {
  if (layer == kOutputLayer) {
    for (std::size_t i = 0; i < kNumActions; ++i) seed.q[i] += scale * g[i];
    return;
  }
  auto& h = seed.hidden[static_cast<std::size_t>(layer - 1)];
  for (std::size_t i = 0; i < kHiddenWidth; ++i) h[i] += scale * g[i];
}

// Computes the value and, when `seed` is non-null, dJ/d(activation).
double loss_core(const QNetwork& net, const ForwardTrace& t, LossKind kind, const LossContext& ctx,
                 ActivationSeed* seed) {
  switch (kind) {
    case LossKind::kCrossEntropy: {
      if (ctx.target_label < 0 || ctx.target_label >= static_cast<int>(kNumActions)) {
        throw ConfigError("cross-entropy target label must be 0 or 1");
      }
      const auto tgt = static_cast<std::size_t>(ctx.target_label);
      const double m = std::max(t.qvalues[0], t.qvalues[1]);
      const double lse = m + std::log(std::exp(t.qvalues[0] - m) + std::exp(t.qvalues[1] - m));
      if (seed) {
        for (std::size_t i = 0; i < kNumActions; ++i) seed->q[i] = t.probs[i] - (i == tgt ? 1.0 : 0.0);
      }
      return lse - t.qvalues[tgt];
    }
    case LossKind::kPdMean:
    case LossKind::kPdL2: {
      double value = 0.0;
      std::array<double, kHiddenWidth> scratch{};
      for (int l : ctx.pd_layers) {
        if (l < 1 || l > static_cast<int>(kNumHidden)) throw ConfigError("pd losses read hidden layers 1..4 only");
        const auto h = t.layer(l);
        const auto n = static_cast<double>(h.size());
        auto& s = seed ? seed->hidden[static_cast<std::size_t>(l - 1)] : scratch;
        if (kind == LossKind::kPdMean) {
          const double m = std::accumulate(h.begin(), h.end(), 0.0) / n;
          value += std::log(m + kPdEps);
          if (seed) {
            for (std::size_t j = 0; j < h.size(); ++j) s[j] += 1.0 / (n * (m + kPdEps));
          }
        } else {
          const double norm = std::sqrt(std::inner_product(h.begin(), h.end(), h.begin(), 0.0));
          value += std::log(norm + kPdEps);
          if (seed && norm > 0.0) {
            for (std::size_t j = 0; j < h.size(); ++j) s[j] += h[j] / (norm * (norm + kPdEps));
          }
        }
      }
      return value;
    }
    case LossKind::kCossimL3:
    case LossKind::kCossimL4: {
      const int layer = ctx.layer != 0 ? ctx.layer : default_layer(kind);
      check_layer(layer);
      if (ctx.clean.size() != kInputDim) throw ConfigError("cossim loss needs the clean input in its context");
      const ForwardTrace ref = forward(net, ctx.clean);
      const auto u = t.layer(layer);
      const auto v = ref.layer(layer);
      const auto c = cosine_similarity(u, v);
      if (!c) throw DegenerateGradient(kind, "cosine similarity undefined: zero activation vector");
      if (seed) {
        const auto g = cosine_gradient(u, v);
        add_seed(*seed, layer, *g, -1.0);
      }
      return -*c;
    }
    case LossKind::kPccPertu: {
      const int layer = ctx.layer != 0 ? ctx.layer : default_layer(kind);
      check_layer(layer);
      if (ctx.delta.size() != kInputDim) throw ConfigError("pcc_pertu loss needs the perturbation in its context");
      const ForwardTrace pert = forward(net, ctx.delta);
      const auto u = t.layer(layer);
      const auto w = pert.layer(layer);
      const auto r = pcc(u, w);
      if (!r) throw DegenerateGradient(kind, "PCC undefined: constant activation vector");
      if (seed) {
        const auto g = pcc_gradient(u, w);
        add_seed(*seed, layer, *g, 1.0);
      }
      return *r;
    }
  }
  return 0.0;
}

}  // namespace

LossEval evaluate_loss(const QNetwork& net, std::span<const double> x_adv, LossKind kind, const LossContext& ctx) {
  const ForwardTrace t = forward(net, x_adv);
  ActivationSeed seed;
  LossEval out;
  out.value = loss_core(net, t, kind, ctx, &seed);
  out.grad = backprop_to_input(net, t, seed);
  if (!std::isfinite(out.value)) throw DegenerateGradient(kind, "non-finite loss value");
  for (double g : out.grad) {
    if (!std::isfinite(g)) throw DegenerateGradient(kind, "non-finite input gradient");
  }
  return out;
}

double loss_value(const QNetwork& net, std::span<const double> x_adv, LossKind kind, const LossContext& ctx) {
  const ForwardTrace t = forward(net, x_adv);
  return loss_core(net, t, kind, ctx, nullptr);
}

LossEval loss_and_input_grad(const QNetwork& net, std::span<const double> x, std::span<const double> delta,
                             LossKind kind, int target_label) {
  if (x.size() != delta.size()) throw ValidationError("loss_and_input_grad: x and delta differ in length");
  std::vector<double> x_adv(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) x_adv[i] = x[i] + delta[i];
  LossContext ctx;
  ctx.target_label = target_label;
  ctx.clean = x;
  ctx.delta = delta;
  return evaluate_loss(net, x_adv, kind, ctx);
}

std::vector<double> input_gradient(const QNetwork& net, std::span<const double> x, LossKind kind,
                                   const LossContext& ctx) {
  return evaluate_loss(net, x, kind, ctx).grad;
}

}  // namespace uapids
