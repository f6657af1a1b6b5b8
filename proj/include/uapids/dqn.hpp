#pragma once

// DQN training over the dataset-as-MDP: a state is a flow record, the action
// is the predicted label, the reward is +1/-1 for a correct/incorrect action,
// and the Q-network regresses Q(s_t, a_t) onto r_t + gamma * max_a Q(s_{t+1}, a)
// one transition at a time. No replay buffer and no target network.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "uapids/flow_data.hpp"
#include "uapids/qnetwork.hpp"
#include "uapids/rng.hpp"

namespace uapids {

struct TrainConfig {
  double gamma = 0.001;
  int episodes = 10;
  double learning_rate = 1e-4;
  double explore_start = 1.0;
  double explore_end = 0.05;
  double explore_fraction = 0.10;
  double reward_correct = 1.0;
  double reward_incorrect = -1.0;
  int runs = 10;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Transition {
  std::size_t state = 0;
  int label = 0;
  std::size_t next_state = 0;
};

// Each episode walks a fresh permutation of the training rows; the next state
// is an independent uniform draw.
class MdpEnvironment {
 public:
  MdpEnvironment(const FlowMatrix& data, std::uint64_t seed);

  Transition step();
  std::size_t size() const { return data_->n; }
  std::size_t episode() const { return episode_; }
  const FlowMatrix& data() const { return *data_; }

 private:
  void reshuffle();

  const FlowMatrix* data_;
  Rng rng_;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
  std::size_t episode_ = 0;
};

Transition env_step(MdpEnvironment& env);

// Linear decay from explore_start to explore_end over the first
// explore_fraction of total_steps, then constant.
double exploration_rate(std::size_t step, std::size_t total_steps, const TrainConfig& cfg);

double bellman_target(double reward, const ForwardTrace& next_trace, double gamma);

struct TrainReport {
  int run_index = 0;
  std::uint64_t seed = 0;
  std::vector<double> episode_train_accuracy;  // fraction of rewarded actions
  std::vector<double> episode_test_accuracy;   // greedy accuracy after each episode
  double test_accuracy = 0.0;
  QNetwork agent;
};

double evaluate_accuracy(const QNetwork& net, const FlowMatrix& data);

// Single run; throws DivergenceError on a non-finite TD loss.
TrainReport train_run(const FlowMatrix& train, const FlowMatrix& test, const TrainConfig& cfg, int run_index);

// cfg.runs independent runs, executed concurrently.
std::vector<TrainReport> train_runs(const FlowMatrix& train, const FlowMatrix& test, const TrainConfig& cfg);

// Index of the report whose test accuracy is closest to the median; ties go to
// the lowest run index.
std::size_t select_median_agent(std::span<const TrainReport> reports);
std::size_t select_median_index(std::span<const double> accuracies);

// CSV: run,episode,train_acc,test_acc,seed
void write_run_ledger(const std::filesystem::path& path, std::span<const TrainReport> reports);

}  // namespace uapids
