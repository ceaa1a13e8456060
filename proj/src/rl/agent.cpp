#include "ecodrive/rl/agent.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ecodrive::rl {

void validate(const TrainConfig& c) {
  if (!(c.gamma >= 0.0 && c.gamma < 1.0)) throw std::invalid_argument("train: gamma must lie in [0, 1)");
  if (!(c.learning_rate > 0.0) || c.batch < 1 || c.train_every < 1)
    throw std::invalid_argument("train: bad optimiser settings");
  if (c.total_steps < 0 || c.warmup < 0 || c.target_sync < 1)
    throw std::invalid_argument("train: bad step counts");
  if (c.total_steps > 0 && c.warmup > c.total_steps) throw std::invalid_argument("train: warmup exceeds total steps");
  if (c.epsilon_start < 0.0 || c.epsilon_start > 1.0 || c.epsilon_end < 0.0 || c.epsilon_end > c.epsilon_start)
    throw std::invalid_argument("train: bad epsilon schedule");
  if (c.beta_start < 0.0 || c.beta_end < c.beta_start || c.beta_end > 1.0)
    throw std::invalid_argument("train: bad importance schedule");
}

namespace {
double linear(long step, long total, double from, double to) {
  if (total <= 0 || step >= total) return to;
  if (step <= 0) return from;
  return from + (to - from) * static_cast<double>(step) / static_cast<double>(total);
}
}  // namespace

double epsilon_at(long step, const TrainConfig& c) {
  return linear(step, c.total_steps, c.epsilon_start, c.epsilon_end);
}

double beta_at(long step, const TrainConfig& c) { return linear(step, c.total_steps, c.beta_start, c.beta_end); }

std::vector<double> q_values(const Network& net, const std::vector<float>& state) {
  const Eigen::Map<const Eigen::MatrixXf> input(state.data(), static_cast<long>(state.size()), 1);
  const Eigen::MatrixXf q = net.forward(input);
  std::vector<double> out(static_cast<std::size_t>(q.rows()));
  for (long a = 0; a < q.rows(); ++a) {
    out[static_cast<std::size_t>(a)] = q(a, 0);
    if (!std::isfinite(out[static_cast<std::size_t>(a)])) throw std::runtime_error("network produced a non-finite Q value");
  }
  return out;
}

ActionId greedy(const std::vector<double>& q) {
  ActionId best = 0;
  for (std::size_t a = 1; a < q.size(); ++a) {
    if (q[a] > q[static_cast<std::size_t>(best)]) best = static_cast<ActionId>(a);
  }
  return best;
}

ActionId epsilon_greedy(const std::vector<double>& q, double epsilon, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (unit(rng) < epsilon) {
    std::uniform_int_distribution<int> pick(0, static_cast<int>(q.size()) - 1);
    return pick(rng);
  }
  return greedy(q);
}

ActionId act(const Network& net, const std::vector<float>& state, double epsilon, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (unit(rng) < epsilon) {
    std::uniform_int_distribution<int> pick(0, net.shape().actions - 1);
    return pick(rng);
  }
  return greedy(q_values(net, state));
}

TrainStepResult train_step(Network& online, const Network& target, Adam<float>& optimizer,
                           PrioritizedReplay& replay, const ReplayBatch& batch, const TrainConfig& config) {
  const long n = static_cast<long>(batch.indices.size());
  const long width = online.shape().inputs;
  Eigen::MatrixXf states(width, n);
  Eigen::MatrixXf next(width, n);
  for (long b = 0; b < n; ++b) {
    const std::size_t i = batch.indices[static_cast<std::size_t>(b)];
    states.col(b) = Eigen::Map<const Eigen::VectorXf>(replay.state(i), width);
    next.col(b) = Eigen::Map<const Eigen::VectorXf>(replay.next_state(i), width);
  }

  const Eigen::MatrixXf q_next = target.forward(next);
  Network::Cache cache;
  const Eigen::MatrixXf q = online.forward(states, cache);

  TrainStepResult result;
  result.td_errors.resize(static_cast<std::size_t>(n));
  Eigen::MatrixXf dq = Eigen::MatrixXf::Zero(q.rows(), n);
  double loss = 0.0;
  for (long b = 0; b < n; ++b) {
    const std::size_t i = batch.indices[static_cast<std::size_t>(b)];
    const int a = replay.action(i);
    double y = replay.reward(i);
    if (!replay.done(i)) y += config.gamma * static_cast<double>(q_next.col(b).maxCoeff());
    const double delta = static_cast<double>(q(a, b)) - y;
    const double w = batch.weights[static_cast<std::size_t>(b)];
    result.td_errors[static_cast<std::size_t>(b)] = delta;
    double grad = 0.0;
    if (config.huber && std::abs(delta) > 1.0) {
      loss += w * (std::abs(delta) - 0.5);
      grad = delta > 0.0 ? 1.0 : -1.0;
    } else if (config.huber) {
      loss += w * 0.5 * delta * delta;
      grad = delta;
    } else {
      loss += w * delta * delta;
      grad = 2.0 * delta;
    }
    dq(a, b) = static_cast<float>(w * grad / static_cast<double>(n));
  }
  loss /= static_cast<double>(n);
  if (!std::isfinite(loss)) {
    std::ostringstream msg;
    msg << "non-finite training loss (batch " << n << ", optimiser step " << optimizer.steps()
        << ", max |Q| " << q.cwiseAbs().maxCoeff() << ")";
    throw std::runtime_error(msg.str());
  }
  optimizer.update(online, online.backward(cache, dq));
  replay.update(batch.indices, result.td_errors);
  result.loss = loss;
  return result;
}

}  // namespace ecodrive::rl
