#include "uapids/dqn.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <numeric>

#include "uapids/errors.hpp"
#include "uapids/format.hpp"

namespace uapids {

void TrainConfig::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma must be in [0, 1]");
  if (episodes <= 0) throw ConfigError("episodes must be positive");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ConfigError("learning rate must be positive");
  if (!(explore_end >= 0.0 && explore_end <= explore_start && explore_start <= 1.0)) {
    throw ConfigError("exploration rates must satisfy 0 <= end <= start <= 1");
  }
  if (!(explore_fraction >= 0.0 && explore_fraction <= 1.0)) throw ConfigError("explore_fraction must be in [0, 1]");
  if (runs <= 0) throw ConfigError("runs must be positive");
}

MdpEnvironment::MdpEnvironment(const FlowMatrix& data, std::uint64_t seed)
    : data_(&data), rng_(make_rng(seed, "mdp")), order_(data.n) {
  if (data.n == 0) throw ValidationError("MDP environment needs a non-empty training set");
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  reshuffle();
}

void MdpEnvironment::reshuffle() {
  std::shuffle(order_.begin(), order_.end(), rng_);
  cursor_ = 0;
}

Transition MdpEnvironment::step() {
  if (cursor_ == order_.size()) {
    ++episode_;
    reshuffle();
  }
  Transition t;
  t.state = order_[cursor_++];
  t.label = data_->labels[t.state];
  std::uniform_int_distribution<std::size_t> pick(0, data_->n - 1);
  t.next_state = pick(rng_);
  return t;
}

Transition env_step(MdpEnvironment& env) { return env.step(); }

double exploration_rate(std::size_t step, std::size_t total_steps, const TrainConfig& cfg) {
  const double decay = cfg.explore_fraction * static_cast<double>(total_steps);
  const auto s = static_cast<double>(step);
  if (decay <= 0.0 || s >= decay) return cfg.explore_end;
  return cfg.explore_start + (cfg.explore_end - cfg.explore_start) * (s / decay);
}

double bellman_target(double reward, const ForwardTrace& next_trace, double gamma) {
  return reward + gamma * std::max(next_trace.qvalues[0], next_trace.qvalues[1]);
}

double evaluate_accuracy(const QNetwork& net, const FlowMatrix& data) {
  if (data.n == 0) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.n; ++i) correct += predict(net, data.row(i)) == data.labels[i] ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(data.n);
}

TrainReport train_run(const FlowMatrix& train, const FlowMatrix& test, const TrainConfig& cfg, int run_index) {
  cfg.validate();
  if (train.d != kInputDim) throw ValidationError("training set must have 76 features");
  TrainReport rep;
  rep.run_index = run_index;
  rep.seed = derive_seed(cfg.seed, "dqn-run", static_cast<std::uint64_t>(run_index));
  rep.agent = make_qnetwork(rep.seed);

  MdpEnvironment env(train, rep.seed);
  Rng explore_rng = make_rng(rep.seed, "explore");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<int> random_action(0, static_cast<int>(kNumActions) - 1);

  AdamState adam;
  adam.learning_rate = cfg.learning_rate;
  ParameterGradients grads;
  ForwardTrace cur, nxt;
  const std::size_t per_episode = train.n;
  const std::size_t total = per_episode * static_cast<std::size_t>(cfg.episodes);

  std::size_t step = 0;
  for (int ep = 0; ep < cfg.episodes; ++ep) {
    std::size_t rewarded = 0;
    for (std::size_t k = 0; k < per_episode; ++k, ++step) {
      const Transition t = env.step();
      forward_into(rep.agent, train.row(t.state), cur);
      const double explore = exploration_rate(step, total, cfg);
      const int action = unif(explore_rng) < explore ? random_action(explore_rng) : cur.predicted();
      const bool correct = action == t.label;
      rewarded += correct ? 1 : 0;
      const double reward = correct ? cfg.reward_correct : cfg.reward_incorrect;

      forward_into(rep.agent, train.row(t.next_state), nxt);
      const double target = bellman_target(reward, nxt, cfg.gamma);
      const double residual = target - cur.qvalues[static_cast<std::size_t>(action)];
      if (!std::isfinite(residual * residual)) {
        throw DivergenceError("run " + std::to_string(run_index) + ": non-finite TD loss at step " +
                              std::to_string(step));
      }
      for (auto& layer : grads.layers) {
        std::fill(layer.weights.begin(), layer.weights.end(), 0.0);
        std::fill(layer.bias.begin(), layer.bias.end(), 0.0);
      }
      std::array<double, kNumActions> dq{};
      dq[static_cast<std::size_t>(action)] = -2.0 * residual;
      backprop_to_params(rep.agent, cur, dq, grads);
      adam_step(adam, rep.agent, grads);
    }
    rep.episode_train_accuracy.push_back(static_cast<double>(rewarded) / static_cast<double>(per_episode));
    rep.episode_test_accuracy.push_back(evaluate_accuracy(rep.agent, test));
  }
  rep.test_accuracy = rep.episode_test_accuracy.back();
  return rep;
}

std::vector<TrainReport> train_runs(const FlowMatrix& train, const FlowMatrix& test, const TrainConfig& cfg) {
  cfg.validate();
  std::vector<TrainReport> reports(static_cast<std::size_t>(cfg.runs));
  std::vector<std::exception_ptr> errors(reports.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (int r = 0; r < cfg.runs; ++r) {
    try {
      reports[static_cast<std::size_t>(r)] = train_run(train, test, cfg, r);
    } catch (...) {
      errors[static_cast<std::size_t>(r)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return reports;
}

std::size_t select_median_index(std::span<const double> accuracies) {
  if (accuracies.empty()) throw ValidationError("median selection needs at least one run");
  std::vector<double> sorted(accuracies.begin(), accuracies.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const double median = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  // Distances that differ only by rounding count as ties.
  constexpr double kTieTolerance = 1e-12;
  std::size_t best = 0;
  double best_dist = std::abs(accuracies[0] - median);
  for (std::size_t i = 1; i < n; ++i) {
    const double dist = std::abs(accuracies[i] - median);
    if (dist < best_dist - kTieTolerance) {
      best = i;
      best_dist = dist;
    }
  }
  return best;
}

std::size_t select_median_agent(std::span<const TrainReport> reports) {
  std::vector<double> accs;
  accs.reserve(reports.size());
  for (const auto& r : reports) accs.push_back(r.test_accuracy);
  return select_median_index(accs);
}

void write_run_ledger(const std::filesystem::path& path, std::span<const TrainReport> reports) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "run,episode,train_acc,test_acc,seed\n";
  for (const auto& r : reports) {
    for (std::size_t e = 0; e < r.episode_train_accuracy.size(); ++e) {
      out << r.run_index << ',' << e + 1 << ',' << format_double(r.episode_train_accuracy[e]) << ','
          << format_double(r.episode_test_accuracy[e]) << ',' << r.seed << '\n';
    }
  }
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace uapids
