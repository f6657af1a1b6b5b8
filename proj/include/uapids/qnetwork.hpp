#pragma once

// Fixed 76-64-64-64-64-2 Q-network with hand-derived backpropagation.
//
// Layer l (1-based) maps width[l-1] -> width[l]. ReLU follows layers 1..4;
// layer 5 is the linear Q-value output, which doubles as the pre-softmax
// logits in the classification phase.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace uapids {

inline constexpr std::size_t kInputDim = 76;
inline constexpr std::size_t kHiddenWidth = 64;
inline constexpr std::size_t kNumActions = 2;
inline constexpr std::size_t kNumHidden = 4;
inline constexpr std::size_t kNumLayers = 5;
inline constexpr std::array<std::size_t, kNumLayers + 1> kLayerWidths{
    kInputDim, kHiddenWidth, kHiddenWidth, kHiddenWidth, kHiddenWidth, kNumActions};

// Index of the Q-value output when addressing "layers" as 1..5.
inline constexpr int kOutputLayer = 5;

// Row-major out x in weight matrix plus bias.
struct DenseLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weights;
  std::vector<double> bias;

  DenseLayer() = default;
  DenseLayer(std::size_t in_dim, std::size_t out_dim)
      : in(in_dim), out(out_dim), weights(in_dim * out_dim, 0.0), bias(out_dim, 0.0) {}

  double& w(std::size_t row, std::size_t col) { return weights[row * in + col]; }
  double w(std::size_t row, std::size_t col) const { return weights[row * in + col]; }

  bool operator==(const DenseLayer&) const = default;
};

using LayerStack = std::array<DenseLayer, kNumLayers>;

LayerStack zero_layers();

struct QNetwork {
  LayerStack layers = zero_layers();
  std::uint64_t rng_seed = 0;

  bool operator==(const QNetwork&) const = default;
};

// Uniform He initialisation: W ~ U(-sqrt(6/fan_in), sqrt(6/fan_in)), zero bias.
QNetwork make_qnetwork(std::uint64_t seed);

bool all_finite(const QNetwork& net);
std::size_t parameter_count(const QNetwork& net);

struct ForwardTrace {
  std::array<double, kInputDim> input{};
  std::array<std::array<double, kHiddenWidth>, kNumHidden> pre{};
  std::array<std::array<double, kHiddenWidth>, kNumHidden> hidden{};
  std::array<double, kNumActions> qvalues{};
  std::array<double, kNumActions> probs{};

  int predicted() const { return qvalues[1] > qvalues[0] ? 1 : 0; }

  // layer in 1..4 -> post-ReLU hidden activation; 5 -> Q-values.
  std::span<const double> layer(int l) const;
};

// Throws ValidationError on wrong size or non-finite input.
ForwardTrace forward(const QNetwork& net, std::span<const double> x);

// Allocation-free variant for hot loops; no validation.
void forward_into(const QNetwork& net, std::span<const double> x, ForwardTrace& trace);

// argmax Q, lowest index on ties. No validation.
int predict(const QNetwork& net, std::span<const double> x);

std::array<double, kNumActions> softmax(const std::array<double, kNumActions>& logits);

// dJ/d(activation) seeded at any subset of the exposed layers.
struct ActivationSeed {
  std::array<std::array<double, kHiddenWidth>, kNumHidden> hidden{};
  std::array<double, kNumActions> q{};
};

std::vector<double> backprop_to_input(const QNetwork& net, const ForwardTrace& trace,
                                      const ActivationSeed& seed);

// Gradient container with the same shapes as the network's layers.
struct ParameterGradients {
  LayerStack layers = zero_layers();
};

// Accumulates d/dtheta of a loss whose gradient w.r.t. the Q-output is dq.
void backprop_to_params(const QNetwork& net, const ForwardTrace& trace,
                        const std::array<double, kNumActions>& dq, ParameterGradients& out);

// Gradients of (td_target - Q(x, action))^2; td_target is a constant.
ParameterGradients weight_gradients(const QNetwork& net, std::span<const double> x, int action,
                                    double td_target);

struct AdamState {
  LayerStack first_moment = zero_layers();
  LayerStack second_moment = zero_layers();
  std::uint64_t step_count = 0;
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_hat = 1e-8;
};

// In-place bias-corrected Adam update. Throws ConfigError on shape mismatch and
// DivergenceError if any parameter becomes non-finite.
void adam_step(AdamState& state, QNetwork& net, const ParameterGradients& grads);

}  // namespace uapids
