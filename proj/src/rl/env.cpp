#include "ecodrive/rl/env.hpp"

#include <cmath>
#include <stdexcept>

namespace ecodrive::rl {

DrivingEnv::DrivingEnv(EnvConfig config) : config_(std::move(config)), frames_(config_.stack) {
  if (config_.decision_interval < 1) throw std::invalid_argument("env: decision interval must be positive");
}

std::vector<float> DrivingEnv::state() const { return flatten(frames_.stacked()); }

std::vector<float> DrivingEnv::reset(const ScenarioConfig& scenario) {
  EpisodeConfig ec = config_.episode;
  ec.scenario = scenario;
  config_.rules.dt = scenario.dt;
  episode_.emplace(ec);
  frames_.clear();
  frames_.push(normalize(episode_->observation(), config_.features));
  return state();
}

EnvStep DrivingEnv::step(ActionId action) {
  if (!active()) throw std::logic_error("env: step without an active episode");
  const ManagedAction requested = decode(action);
  Episode& ep = *episode_;
  const double dt = ep.world().config.dt;
  const auto& w = ep.config().weights;

  RewardBreakdown mean;
  bool lane_changed = false;
  bool danger = false;
  int n = 0;
  for (; n < config_.decision_interval && !ep.finished(); ++n) {
    const Observation& obs = ep.observation();
    ManagedAction rl = requested;
    if (n > 0) rl.lane_target = 0;
    ManagedAction exec = decision_manager(obs, rl, ep.world().ego, ep.world().ego_params, config_.rules);
    bool vetoed = false;
    if (config_.safety_filter) {
      const SbrResult gate = sbr_filter(exec, forward_danger(obs, config_.rules), obs.w_l > 0.5, obs.w_r > 0.5, ep.world().ego.v,
                                        config_.rules);
      exec = gate.action;
      vetoed = gate.danger;
    }
    const RewardBreakdown r = ep.step(exec, vetoed);
    mean.R_velocity += r.R_velocity;
    mean.R_energy += r.R_energy;
    mean.R_GP += r.R_GP;
    lane_changed = lane_changed || r.R_lanechange < 0.0;
    danger = danger || vetoed;
    frames_.push(normalize(ep.observation(), config_.features));
  }
  mean.R_velocity /= n;
  mean.R_energy /= n;
  mean.R_GP /= n;
  mean.R_lanechange = lane_changed ? -0.1 : 0.0;
  mean.R_danger = danger ? -0.5 : 0.0;
  mean.R_time = -ep.elapsed();

  EnvStep out;
  out.reward = learning_reward(mean, w, n * dt);
  mean.total = out.reward;
  out.terms = mean;
  out.done = ep.finished();
  out.terminal = ep.status() == EpisodeStatus::Success || ep.status() == EpisodeStatus::Collision;
  out.state = state();
  return out;
}

PolicyOutcome run_policy(DrivingEnv& env, const ScenarioConfig& scenario, const Policy& policy, double gamma) {
  PolicyOutcome out;
  std::vector<float> s = env.reset(scenario);
  double discount = 1.0;
  while (env.active()) {
    const EnvStep r = env.step(policy(s));
    out.discounted_return += discount * r.reward;
    out.total_reward += r.reward;
    discount *= gamma;
    ++out.decisions;
    s = r.state;
  }
  const Episode& ep = env.episode();
  out.status = ep.status();
  out.travel_time = ep.travel_time();
  out.energy = ep.energy();
  out.avg_speed = ep.steps() > 0 ? ep.speed_sum() / static_cast<double>(ep.steps()) : 0.0;
  return out;
}

}  // namespace ecodrive::rl
