#include "uapids/qnetwork.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "uapids/errors.hpp"
#include "uapids/rng.hpp"

namespace uapids {

LayerStack zero_layers() {
  LayerStack layers;
  for (std::size_t l = 0; l < kNumLayers; ++l) {
    layers[l] = DenseLayer(kLayerWidths[l], kLayerWidths[l + 1]);
  }
  return layers;
}

QNetwork make_qnetwork(std::uint64_t seed) {
  QNetwork net;
  net.rng_seed = seed;
  Rng rng = make_rng(seed, "qnetwork-init");
  for (auto& layer : net.layers) {
    const double limit = std::sqrt(6.0 / static_cast<double>(layer.in));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (double& w : layer.weights) w = dist(rng);
  }
  return net;
}

bool all_finite(const QNetwork& net) {
  for (const auto& layer : net.layers) {
    for (double w : layer.weights)
      if (!std::isfinite(w)) return false;
    for (double b : layer.bias)
      if (!std::isfinite(b)) return false;
  }
  return true;
}

std::size_t parameter_count(const QNetwork& net) {
  std::size_t n = 0;
  for (const auto& layer : net.layers) n += layer.weights.size() + layer.bias.size();
  return n;
}

std::span<const double> ForwardTrace::layer(int l) const {
  if (l >= 1 && l <= static_cast<int>(kNumHidden)) return hidden[static_cast<std::size_t>(l - 1)];
  if (l == kOutputLayer) return qvalues;
  throw ValidationError("layer index out of range: " + std::to_string(l));
}

std::array<double, kNumActions> softmax(const std::array<double, kNumActions>& logits) {
  const double m = std::max(logits[0], logits[1]);
  const double e0 = std::exp(logits[0] - m);
  const double e1 = std::exp(logits[1] - m);
  const double s = e0 + e1;
  return {e0 / s, e1 / s};
}

namespace {

// out = W * in + b
inline void affine(const DenseLayer& layer, const double* in, double* out) {
  for (std::size_t r = 0; r < layer.out; ++r) {
    const double* row = layer.weights.data() + r * layer.in;
    double acc = layer.bias[r];
    for (std::size_t c = 0; c < layer.in; ++c) acc += row[c] * in[c];
    out[r] = acc;
  }
}

// in_grad = W^T * out_grad
inline void affine_transpose(const DenseLayer& layer, const double* out_grad, double* in_grad) {
  std::fill(in_grad, in_grad + layer.in, 0.0);
  for (std::size_t r = 0; r < layer.out; ++r) {
    const double g = out_grad[r];
    if (g == 0.0) continue;
    const double* row = layer.weights.data() + r * layer.in;
    for (std::size_t c = 0; c < layer.in; ++c) in_grad[c] += row[c] * g;
  }
}

}  // namespace

void forward_into(const QNetwork& net, std::span<const double> x, ForwardTrace& trace) {
  std::copy(x.begin(), x.end(), trace.input.begin());
  const double* in = trace.input.data();
  for (std::size_t l = 0; l < kNumHidden; ++l) {
    affine(net.layers[l], in, trace.pre[l].data());
    for (std::size_t j = 0; j < kHiddenWidth; ++j) trace.hidden[l][j] = std::max(0.0, trace.pre[l][j]);
    in = trace.hidden[l].data();
  }
  affine(net.layers[kNumHidden], in, trace.qvalues.data());
  trace.probs = softmax(trace.qvalues);
}

ForwardTrace forward(const QNetwork& net, std::span<const double> x) {
  if (x.size() != kInputDim) {
    throw ValidationError("forward: expected " + std::to_string(kInputDim) + " features, got " +
                          std::to_string(x.size()));
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw ValidationError("forward: non-finite input feature");
  }
  ForwardTrace trace;
  forward_into(net, x, trace);
  return trace;
}

int predict(const QNetwork& net, std::span<const double> x) {
  std::array<double, kHiddenWidth> a{};
  std::array<double, kHiddenWidth> b{};
  affine(net.layers[0], x.data(), a.data());
  for (double& v : a) v = std::max(0.0, v);
  for (std::size_t l = 1; l < kNumHidden; ++l) {
    affine(net.layers[l], a.data(), b.data());
    for (std::size_t j = 0; j < kHiddenWidth; ++j) a[j] = std::max(0.0, b[j]);
  }
  std::array<double, kNumActions> q{};
  affine(net.layers[kNumHidden], a.data(), q.data());
  return q[1] > q[0] ? 1 : 0;
}

std::vector<double> backprop_to_input(const QNetwork& net, const ForwardTrace& trace,
                                      const ActivationSeed& seed) {
  std::array<double, kHiddenWidth> dh{};
  std::array<double, kHiddenWidth> dz{};
  affine_transpose(net.layers[kNumHidden], seed.q.data(), dh.data());
  for (std::size_t l = kNumHidden; l-- > 0;) {
    for (std::size_t j = 0; j < kHiddenWidth; ++j) {
      const double total = dh[j] + seed.hidden[l][j];
      // ReLU subgradient at 0 is 0.
      dz[j] = trace.pre[l][j] > 0.0 ? total : 0.0;
    }
    if (l == 0) break;
    affine_transpose(net.layers[l], dz.data(), dh.data());
  }
  std::vector<double> dx(kInputDim, 0.0);
  affine_transpose(net.layers[0], dz.data(), dx.data());
  return dx;
}

void backprop_to_params(const QNetwork& net, const ForwardTrace& trace,
                        const std::array<double, kNumActions>& dq, ParameterGradients& out) {
  std::array<double, kHiddenWidth> dz{};
  std::array<double, kHiddenWidth> dh{};

  auto accumulate = [](DenseLayer& g, const double* delta, const double* input) {
    for (std::size_t r = 0; r < g.out; ++r) {
      const double d = delta[r];
      g.bias[r] += d;
      if (d == 0.0) continue;
      double* row = g.weights.data() + r * g.in;
      for (std::size_t c = 0; c < g.in; ++c) row[c] += d * input[c];
    }
  };

  accumulate(out.layers[kNumHidden], dq.data(), trace.hidden[kNumHidden - 1].data());
  affine_transpose(net.layers[kNumHidden], dq.data(), dh.data());
  for (std::size_t l = kNumHidden; l-- > 0;) {
    for (std::size_t j = 0; j < kHiddenWidth; ++j) dz[j] = trace.pre[l][j] > 0.0 ? dh[j] : 0.0;
    const double* input = l == 0 ? trace.input.data() : trace.hidden[l - 1].data();
    accumulate(out.layers[l], dz.data(), input);
    if (l == 0) break;
    affine_transpose(net.layers[l], dz.data(), dh.data());
  }
}

ParameterGradients weight_gradients(const QNetwork& net, std::span<const double> x, int action,
                                    double td_target) {
  if (action < 0 || action >= static_cast<int>(kNumActions)) {
    throw ValidationError("weight_gradients: action must be 0 or 1");
  }
  if (!std::isfinite(td_target)) throw ValidationError("weight_gradients: non-finite TD target");
  const ForwardTrace trace = forward(net, x);
  std::array<double, kNumActions> dq{};
  dq[static_cast<std::size_t>(action)] = -2.0 * (td_target - trace.qvalues[static_cast<std::size_t>(action)]);
  ParameterGradients grads;
  backprop_to_params(net, trace, dq, grads);
  return grads;
}

constexpr double kSmallestNormal = std::numeric_limits<double>::min();

void adam_step(AdamState& state, QNetwork& net, const ParameterGradients& grads) {
  for (std::size_t l = 0; l < kNumLayers; ++l) {
    const auto& p = net.layers[l];
    const auto& g = grads.layers[l];
    const auto& m = state.first_moment[l];
    const auto& v = state.second_moment[l];
    if (g.weights.size() != p.weights.size() || g.bias.size() != p.bias.size() ||
        m.weights.size() != p.weights.size() || v.weights.size() != p.weights.size() ||
        m.bias.size() != p.bias.size() || v.bias.size() != p.bias.size()) {
      throw ConfigError("adam_step: gradient/moment shapes do not match layer " + std::to_string(l + 1));
    }
  }

  state.step_count += 1;
  const double t = static_cast<double>(state.step_count);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  const double b1 = state.beta1;
  const double b2 = state.beta2;
  const double lr = state.learning_rate;
  const double eps = state.eps_hat;

  auto update = [&](std::vector<double>& param, const std::vector<double>& grad, std::vector<double>& m,
                    std::vector<double>& v) {
    for (std::size_t i = 0; i < param.size(); ++i) {
      const double gi = grad[i];
      m[i] = b1 * m[i] + (1.0 - b1) * gi;
      v[i] = b2 * v[i] + (1.0 - b2) * gi * gi;
      // Decaying moments of idle parameters otherwise crawl through the
      // subnormal range, which is very slow on x86. The update they would
      // contribute is below 1e-300.
      if (std::abs(m[i]) < kSmallestNormal) m[i] = 0.0;
      if (v[i] < kSmallestNormal) v[i] = 0.0;
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      param[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
    }
  };

  for (std::size_t l = 0; l < kNumLayers; ++l) {
    update(net.layers[l].weights, grads.layers[l].weights, state.first_moment[l].weights,
           state.second_moment[l].weights);
    update(net.layers[l].bias, grads.layers[l].bias, state.first_moment[l].bias, state.second_moment[l].bias);
  }
  if (!all_finite(net)) throw DivergenceError("adam_step: parameters became non-finite");
}

}  // namespace uapids
