#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace ecodrive::rl {

/// Complete binary tree over leaf values supporting prefix-sum search.
class SumTree {
 public:
  explicit SumTree(std::size_t capacity = 1);

  void set(std::size_t index, double value);
  double get(std::size_t index) const { return nodes_[leaves_ + index]; }
  double total() const { return nodes_[1]; }
  /// Leaf whose cumulative range contains `mass`, for mass in [0, total).
  std::size_t find(double mass) const;

 private:
  std::size_t leaves_;
  std::vector<double> nodes_;
};

/// Same layout as SumTree, keeping the minimum instead of the sum.
class MinTree {
 public:
  explicit MinTree(std::size_t capacity = 1);

  void set(std::size_t index, double value);
  double min() const { return nodes_[1]; }

 private:
  std::size_t leaves_;
  std::vector<double> nodes_;
};

struct ReplayConfig {
  std::size_t capacity = 50000;
  double alpha = 0.6;     ///< priority exponent
  double epsilon = 1e-3;  ///< added to |td| so no priority vanishes
};

struct Transition {
  std::vector<float> state;
  int action = 0;
  float reward = 0.0F;
  std::vector<float> next_state;
  bool done = false;
};

struct ReplayBatch {
  std::vector<std::size_t> indices;
  std::vector<double> weights;  ///< importance weights, max-normalised
};

/// Proportional prioritized replay with FIFO eviction.
class PrioritizedReplay {
 public:
  PrioritizedReplay(std::size_t state_size, ReplayConfig config);

  void add(const Transition& t);
  std::size_t size() const { return size_; }
  std::size_t capacity() const { return config_.capacity; }

  /// Independent draws with P(i) proportional to priority; throws when empty.
  ReplayBatch sample(std::size_t batch, double beta, std::mt19937_64& rng) const;
  void update(const std::vector<std::size_t>& indices, const std::vector<double>& td_errors);

  /// Sets a stored priority directly (already exponentiated).
  void set_priority(std::size_t index, double priority);
  double priority(std::size_t index) const { return sums_.get(index); }
  double probability(std::size_t index) const { return sums_.get(index) / sums_.total(); }

  const float* state(std::size_t i) const { return &states_[i * state_size_]; }
  const float* next_state(std::size_t i) const { return &next_states_[i * state_size_]; }
  int action(std::size_t i) const { return actions_[i]; }
  float reward(std::size_t i) const { return rewards_[i]; }
  bool done(std::size_t i) const { return dones_[i] != 0; }

 private:
  std::size_t state_size_;
  ReplayConfig config_;
  std::vector<float> states_;
  std::vector<float> next_states_;
  std::vector<int> actions_;
  std::vector<float> rewards_;
  std::vector<std::uint8_t> dones_;
  SumTree sums_;
  MinTree mins_;
  std::size_t next_ = 0;
  std::size_t size_ = 0;
  double max_priority_ = 1.0;
};

}  // namespace ecodrive::rl
