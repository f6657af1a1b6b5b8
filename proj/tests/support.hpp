#pragma once

// Shared fixtures for the unit and acceptance tests.

#include <cmath>
#include <random>
#include <span>
#include <vector>

#include "uapids/flow_data.hpp"
#include "uapids/pipeline.hpp"
#include "uapids/qnetwork.hpp"
#include "uapids/synth.hpp"

namespace uapids::testing {

inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

// He-initialised network with nonzero biases so every layer is exercised.
inline QNetwork random_net(std::uint64_t seed) {
  QNetwork net = make_qnetwork(seed);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  for (auto& l : net.layers)
    for (double& b : l.bias) b = u(rng);
  return net;
}

// True if the ReLU on/off pattern is the same at all three inputs.
inline bool same_relu_pattern(const QNetwork& net, std::span<const double> a, std::span<const double> b,
                              std::span<const double> c) {
  const ForwardTrace ta = forward(net, a);
  const ForwardTrace tb = forward(net, b);
  const ForwardTrace tc = forward(net, c);
  for (std::size_t l = 0; l < kNumHidden; ++l) {
    for (std::size_t j = 0; j < kHiddenWidth; ++j) {
      const bool on = ta.pre[l][j] > 0.0;
      if ((tb.pre[l][j] > 0.0) != on || (tc.pre[l][j] > 0.0) != on) return false;
    }
  }
  return true;
}

// Q1 = relu(w . x + b) passed straight through the hidden stack, Q0 = threshold.
// Predicts attack exactly when relu(w . x + b) > threshold.
inline QNetwork score_net(std::span<const double> w, double b, double threshold) {
  QNetwork net;
  for (std::size_t j = 0; j < kInputDim; ++j) net.layers[0].w(0, j) = w[j];
  net.layers[0].bias[0] = b;
  for (std::size_t l = 1; l < kNumHidden; ++l) net.layers[l].w(0, 0) = 1.0;
  net.layers[4].w(1, 0) = 1.0;
  net.layers[4].bias[0] = threshold;
  return net;
}

inline double rel_error(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

// Small prepared synthetic dataset (fitted schema, canonical rows).
inline PreparedData small_prepared(std::size_t n_benign = 300, std::size_t n_attack = 200, std::uint64_t seed = 7,
                                   double separation = 3.0) {
  SynthConfig sc;
  sc.n_benign = n_benign;
  sc.n_attack = n_attack;
  sc.seed = seed;
  sc.separation = separation;
  PrepareConfig pc;
  pc.seed = seed;
  return prepare_datasets(synth_generate(sc), FeatureSchema::cicids2018(), pc);
}

}  // namespace uapids::testing
