#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "support.hpp"
#include "uapids/errors.hpp"
#include "uapids/losses.hpp"
#include "uapids/qnetwork.hpp"

using namespace uapids;
using namespace uapids::testing;

namespace {

// Straight-line re-evaluation without the trace machinery.
std::vector<double> reference_q(const QNetwork& net, const std::vector<double>& x) {
  std::vector<double> a = x;
  for (std::size_t l = 0; l < kNumLayers; ++l) {
    const auto& L = net.layers[l];
    std::vector<double> z(L.out);
    for (std::size_t r = 0; r < L.out; ++r) {
      long double s = L.bias[r];
      for (std::size_t c = 0; c < L.in; ++c) s += static_cast<long double>(L.weights[r * L.in + c]) * a[c];
      z[r] = static_cast<double>(s);
      if (l + 1 < kNumLayers && z[r] < 0.0) z[r] = 0.0;
    }
    a = z;
  }
  return a;
}

}  // namespace

TEST_CASE("zero network outputs equal Q-values and uniform probabilities") {
  QNetwork net;
  std::mt19937_64 rng(1);
  const auto x = random_vector(rng, kInputDim, 0.0, 1.0);
  const ForwardTrace t = forward(net, x);
  CHECK(t.qvalues[0] == 0.0);
  CHECK(t.qvalues[1] == 0.0);
  CHECK(t.probs[0] == doctest::Approx(0.5));
  CHECK(t.probs[1] == doctest::Approx(0.5));
  CHECK(t.predicted() == 0);
}

TEST_CASE("positive single path keeps ReLU inactive") {
  QNetwork net;
  for (auto& l : net.layers) {
    for (std::size_t r = 0; r < l.out; ++r)
      for (std::size_t c = 0; c < l.in; ++c) l.w(r, c) = 0.01 * static_cast<double>((r + c) % 3 + 1);
  }
  std::mt19937_64 rng(2);
  const auto x = random_vector(rng, kInputDim, 0.0, 1.0);
  const ForwardTrace t = forward(net, x);
  for (std::size_t l = 0; l < kNumHidden; ++l)
    for (std::size_t j = 0; j < kHiddenWidth; ++j) CHECK(t.hidden[l][j] == t.pre[l][j]);
}

TEST_CASE("forward matches an independent evaluation") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const QNetwork net = random_net(s);
    std::mt19937_64 rng(100 + s);
    const auto x = random_vector(rng, kInputDim, 0.0, 1.0);
    const auto ref = reference_q(net, x);
    const ForwardTrace t = forward(net, x);
    CHECK(t.qvalues[0] == doctest::Approx(ref[0]).epsilon(1e-12));
    CHECK(t.qvalues[1] == doctest::Approx(ref[1]).epsilon(1e-12));
    CHECK(predict(net, x) == t.predicted());
  }
}

TEST_CASE("forward validates its input") {
  const QNetwork net = random_net(3);
  std::vector<double> x(kInputDim, 0.5);
  x[10] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(forward(net, x), ValidationError);
  x[10] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(forward(net, x), ValidationError);
  CHECK_THROWS_AS(forward(net, std::vector<double>(5, 0.0)), ValidationError);
}

TEST_CASE("softmax sums to one and agrees with argmax") {
  std::mt19937_64 rng(4);
  for (std::uint64_t s = 0; s < 50; ++s) {
    const QNetwork net = random_net(s);
    const auto x = random_vector(rng, kInputDim, 0.0, 1.0);
    const ForwardTrace t = forward(net, x);
    CHECK(std::abs(t.probs[0] + t.probs[1] - 1.0) <= 1e-9);
    CHECK((t.probs[1] > t.probs[0]) == (t.qvalues[1] > t.qvalues[0]));
    for (std::size_t l = 0; l < kNumHidden; ++l)
      for (double h : t.hidden[l]) CHECK(h >= 0.0);
  }
  const auto p = softmax({1000.0, -1000.0});
  CHECK(p[0] == doctest::Approx(1.0));
  CHECK(std::isfinite(p[1]));
}

TEST_CASE("forward is pure") {
  const QNetwork net = random_net(5);
  std::mt19937_64 rng(5);
  const auto x = random_vector(rng, kInputDim, 0.0, 1.0);
  const ForwardTrace a = forward(net, x);
  const ForwardTrace b = forward(net, x);
  CHECK(a.qvalues == b.qvalues);
  CHECK(a.hidden == b.hidden);
  CHECK(a.probs == b.probs);
}

TEST_CASE("zero network has a zero cross-entropy input gradient") {
  QNetwork net;
  std::vector<double> x(kInputDim, 0.3);
  LossContext ctx;
  for (double g : input_gradient(net, x, LossKind::kCrossEntropy, ctx)) CHECK(g == 0.0);
}

TEST_CASE("weight gradients vanish at the TD target") {
  const QNetwork net = random_net(6);
  std::mt19937_64 rng(6);
  const auto x = random_vector(rng, kInputDim, 0.0, 1.0);
  const ForwardTrace t = forward(net, x);
  const ParameterGradients g = weight_gradients(net, x, 1, t.qvalues[1]);
  for (const auto& l : g.layers) {
    for (double v : l.weights) CHECK(v == 0.0);
    for (double v : l.bias) CHECK(v == 0.0);
  }
}

TEST_CASE("weight gradients scale with the TD residual") {
  const QNetwork net = random_net(7);
  std::mt19937_64 rng(7);
  const auto x = random_vector(rng, kInputDim, 0.0, 1.0);
  const double q = forward(net, x).qvalues[0];
  const ParameterGradients g1 = weight_gradients(net, x, 0, q + 0.3);
  const ParameterGradients g2 = weight_gradients(net, x, 0, q + 0.6);
  for (std::size_t l = 0; l < kNumLayers; ++l) {
    for (std::size_t i = 0; i < g1.layers[l].weights.size(); ++i) {
      CHECK(g2.layers[l].weights[i] == doctest::Approx(2.0 * g1.layers[l].weights[i]).epsilon(1e-9));
    }
  }
}

TEST_CASE("weight gradients match finite differences") {
  constexpr double h = 1e-4;
  int checked = 0;
  for (std::uint64_t s = 0; s < 5; ++s) {
    QNetwork net = random_net(10 + s);
    std::mt19937_64 rng(10 + s);
    const auto x = random_vector(rng, kInputDim, 0.0, 1.0);
    const int action = static_cast<int>(s % 2);
    const double target = 1.0;
    const ParameterGradients g = weight_gradients(net, x, action, target);
    auto td_loss = [&](const QNetwork& n) {
      const double q = forward(n, x).qvalues[static_cast<std::size_t>(action)];
      return (target - q) * (target - q);
    };
    std::uniform_int_distribution<std::size_t> pick_layer(0, kNumLayers - 1);
    for (int k = 0; k < 80; ++k) {
      const std::size_t l = pick_layer(rng);
      const bool bias = rng() % 4 == 0;
      auto& vec = bias ? net.layers[l].bias : net.layers[l].weights;
      std::uniform_int_distribution<std::size_t> pick(0, vec.size() - 1);
      const std::size_t i = pick(rng);
      const double analytic = bias ? g.layers[l].bias[i] : g.layers[l].weights[i];
      const double orig = vec[i];
      vec[i] = orig + h;
      const double up = td_loss(net);
      vec[i] = orig - h;
      const double down = td_loss(net);
      vec[i] = orig;
      const double numeric = (up - down) / (2 * h);
      if (std::abs(analytic) < 1e-8) continue;
      CHECK(rel_error(analytic, numeric) < 1e-4);
      ++checked;
    }
  }
  CHECK(checked > 50);
}

TEST_CASE("adam with zero gradients only advances the step count") {
  QNetwork net = random_net(8);
  const QNetwork before = net;
  AdamState st;
  ParameterGradients g;
  adam_step(st, net, g);
  CHECK(net == before);
  CHECK(st.step_count == 1);
  adam_step(st, net, g);
  CHECK(st.step_count == 2);
}

TEST_CASE("adam single step matches hand computation") {
  QNetwork net;
  AdamState st;
  ParameterGradients g;
  g.layers[0].weights[0] = 0.5;
  g.layers[0].weights[1] = -2e-3;
  g.layers[4].bias[1] = 3.0;
  adam_step(st, net, g);
  // m_hat = g, v_hat = g^2, so the update is -lr * g / (|g| + eps_hat).
  CHECK(net.layers[0].weights[0] == doctest::Approx(-1e-4 * 0.5 / (0.5 + 1e-8)).epsilon(1e-12));
  CHECK(net.layers[0].weights[1] == doctest::Approx(1e-4 * 2e-3 / (2e-3 + 1e-8)).epsilon(1e-12));
  CHECK(net.layers[4].bias[1] == doctest::Approx(-1e-4 * 3.0 / (3.0 + 1e-8)).epsilon(1e-12));
  CHECK(net.layers[0].weights[2] == 0.0);
}

TEST_CASE("adam under a constant gradient steps by the learning rate") {
  QNetwork net;
  AdamState st;
  ParameterGradients g;
  g.layers[2].weights[5] = 0.25;
  g.layers[2].weights[6] = -4.0;
  double prev5 = 0.0, prev6 = 0.0;
  for (int i = 0; i < 2000; ++i) {
    prev5 = net.layers[2].weights[5];
    prev6 = net.layers[2].weights[6];
    adam_step(st, net, g);
  }
  CHECK(net.layers[2].weights[5] - prev5 == doctest::Approx(-1e-4).epsilon(1e-6));
  CHECK(net.layers[2].weights[6] - prev6 == doctest::Approx(1e-4).epsilon(1e-6));
}

TEST_CASE("adam rejects mismatched shapes") {
  QNetwork net;
  AdamState st;
  ParameterGradients g;
  g.layers[1].weights.pop_back();
  CHECK_THROWS_AS(adam_step(st, net, g), ConfigError);
}

TEST_CASE("He initialisation is seeded and bounded") {
  const QNetwork a = make_qnetwork(42);
  const QNetwork b = make_qnetwork(42);
  const QNetwork c = make_qnetwork(43);
  CHECK(a == b);
  CHECK_FALSE(a == c);
  CHECK(parameter_count(a) == 76 * 64 + 64 + 3 * (64 * 64 + 64) + 64 * 2 + 2);
  for (std::size_t l = 0; l < kNumLayers; ++l) {
    const double bound = std::sqrt(6.0 / static_cast<double>(a.layers[l].in));
    for (double w : a.layers[l].weights) CHECK(std::abs(w) <= bound);
  }
  CHECK(all_finite(a));
}
