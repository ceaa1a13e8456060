#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "ecodrive/rl/action.hpp"
#include "ecodrive/rl/network.hpp"
#include "ecodrive/rl/replay.hpp"

namespace ecodrive::rl {

using Network = DuelingNetwork<float>;

struct TrainConfig {
  double learning_rate = 2.5e-4;
  double gamma = 0.99;
  int batch = 64;
  long warmup = 10000;       ///< transitions collected before the first update
  long target_sync = 10000;  ///< steps between target-network copies
  long total_steps = 100000;
  double epsilon_start = 1.0;
  double epsilon_end = 1e-5;
  double beta_start = 0.4;
  double beta_end = 1.0;
  bool huber = false;
  int train_every = 1;
  long eval_every = 10000;  ///< 0 disables periodic evaluation
  int eval_episodes = 3;
  ReplayConfig replay;
  NetworkShape network;
  std::uint64_t seed = 1;
};

/// Throws std::invalid_argument on inconsistent values.
void validate(const TrainConfig& config);

/// Linear from epsilon_start at step 0 to epsilon_end at total_steps, flat after.
double epsilon_at(long step, const TrainConfig& config);
/// Linear from beta_start to beta_end over the run.
double beta_at(long step, const TrainConfig& config);

std::vector<double> q_values(const Network& net, const std::vector<float>& state);

/// Highest entry; the lowest index wins a tie.
ActionId greedy(const std::vector<double>& q);

/// Uniform random action with probability epsilon, otherwise greedy(q).
ActionId epsilon_greedy(const std::vector<double>& q, double epsilon, std::mt19937_64& rng);
ActionId act(const Network& net, const std::vector<float>& state, double epsilon, std::mt19937_64& rng);

struct TrainStepResult {
  double loss = 0.0;
  std::vector<double> td_errors;
};

/// One importance-weighted TD update of `online` from the sampled batch.
/// Targets use `target`; priorities in `replay` are refreshed.
TrainStepResult train_step(Network& online, const Network& target, Adam<float>& optimizer,
                           PrioritizedReplay& replay, const ReplayBatch& batch, const TrainConfig& config);

}  // namespace ecodrive::rl
