#include "ecodrive/rl/replay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ecodrive::rl {
namespace {

std::size_t leaf_count(std::size_t capacity) {
  std::size_t n = 1;
  while (n < capacity) n <<= 1;
  return n;
}

}  // namespace

SumTree::SumTree(std::size_t capacity) : leaves_(leaf_count(capacity)), nodes_(2 * leaves_, 0.0) {}

void SumTree::set(std::size_t index, double value) {
  std::size_t node = leaves_ + index;
  nodes_[node] = value;
  for (node >>= 1; node >= 1; node >>= 1) nodes_[node] = nodes_[2 * node] + nodes_[2 * node + 1];
}

std::size_t SumTree::find(double mass) const {
  std::size_t node = 1;
  while (node < leaves_) {
    const double left = nodes_[2 * node];
    if (mass < left || nodes_[2 * node + 1] <= 0.0) {
      node = 2 * node;
    } else {
      mass -= left;
      node = 2 * node + 1;
    }
  }
  return node - leaves_;
}

MinTree::MinTree(std::size_t capacity)
    : leaves_(leaf_count(capacity)), nodes_(2 * leaves_, std::numeric_limits<double>::infinity()) {}

void MinTree::set(std::size_t index, double value) {
  std::size_t node = leaves_ + index;
  nodes_[node] = value;
  for (node >>= 1; node >= 1; node >>= 1) nodes_[node] = std::min(nodes_[2 * node], nodes_[2 * node + 1]);
}

PrioritizedReplay::PrioritizedReplay(std::size_t state_size, ReplayConfig config)
    : state_size_(state_size),
      config_(config),
      states_(config.capacity * state_size),
      next_states_(config.capacity * state_size),
      actions_(config.capacity),
      rewards_(config.capacity),
      dones_(config.capacity),
      sums_(config.capacity),
      mins_(config.capacity) {
  if (config.capacity == 0) throw std::invalid_argument("replay: zero capacity");
  if (config.alpha < 0.0 || !(config.epsilon > 0.0)) throw std::invalid_argument("replay: bad priority constants");
}

void PrioritizedReplay::add(const Transition& t) {
  if (t.state.size() != state_size_ || t.next_state.size() != state_size_)
    throw std::invalid_argument("replay: state width mismatch");
  std::copy(t.state.begin(), t.state.end(), states_.begin() + static_cast<long>(next_ * state_size_));
  std::copy(t.next_state.begin(), t.next_state.end(), next_states_.begin() + static_cast<long>(next_ * state_size_));
  actions_[next_] = t.action;
  rewards_[next_] = t.reward;
  dones_[next_] = t.done ? 1 : 0;
  set_priority(next_, max_priority_);
  next_ = (next_ + 1) % config_.capacity;
  size_ = std::min(size_ + 1, config_.capacity);
}

void PrioritizedReplay::set_priority(std::size_t index, double priority) {
  sums_.set(index, priority);
  mins_.set(index, priority);
  max_priority_ = std::max(max_priority_, priority);
}

ReplayBatch PrioritizedReplay::sample(std::size_t batch, double beta, std::mt19937_64& rng) const {
  if (size_ == 0) throw std::logic_error("replay: sampling from an empty buffer");
  const double total = sums_.total();
  const double n = static_cast<double>(size_);
  const double max_weight = std::pow(n * mins_.min() / total, -beta);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ReplayBatch out;
  out.indices.reserve(batch);
  out.weights.reserve(batch);
  for (std::size_t k = 0; k < batch; ++k) {
    const std::size_t i = std::min(sums_.find(unit(rng) * total), size_ - 1);
    out.indices.push_back(i);
    out.weights.push_back(std::pow(n * sums_.get(i) / total, -beta) / max_weight);
  }
  return out;
}

void PrioritizedReplay::update(const std::vector<std::size_t>& indices, const std::vector<double>& td_errors) {
  if (indices.size() != td_errors.size()) throw std::invalid_argument("replay: index/error count mismatch");
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (!std::isfinite(td_errors[k])) throw std::runtime_error("replay: non-finite TD error");
    set_priority(indices[k], std::pow(std::abs(td_errors[k]) + config_.epsilon, config_.alpha));
  }
}

}  // namespace ecodrive::rl
