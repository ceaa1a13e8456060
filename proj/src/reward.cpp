#include "ecodrive/reward.hpp"

#include <algorithm>

#include "ecodrive/trajectory.hpp"

namespace ecodrive {

bool is_valid(const RewardWeights& w) {
  return w.velocity >= 0.0 && w.energy >= 0.0 && w.time >= 0.0 && w.lane_change >= 0.0 && w.danger >= 0.0 &&
         w.green_pass >= 0.0;
}

RewardScale make_reward_scale(double v_max, double a_max, const EnergyParams& energy, double dt) {
  RewardScale scale;
  scale.v_max = v_max;
  scale.energy_norm = step_energy(v_max, a_max, energy, dt, false);
  if (!(scale.energy_norm > 0.0)) scale.energy_norm = 1.0;
  return scale;
}

double velocity_reward(double v, double v_min, double v_max) {
  return std::clamp((v - v_min) / (v_max - v_min), 0.0, 1.0);
}

double green_pass_reward(double v, double a, double d_r, double T_r, Phase phase) {
  if (d_r <= 0.0) return 0.0;
  const bool reachable = v * T_r > d_r;
  if (phase == Phase::Green) {
    if (reachable) return a > 0.0 ? 0.2 : (a == 0.0 ? 0.5 : -1.0);
    return a > 0.0 ? 1.0 : (a == 0.0 ? 0.5 : -1.0);
  }
  if (reachable) return a > 0.0 ? -1.0 : (a == 0.0 ? 0.5 : 0.2);
  return a > 0.0 ? 0.5 : (a == 0.0 ? 0.5 : -0.5);
}

RewardBreakdown lstr(const Observation& obs, const ManagedAction& exec_action, const RewardFlags& flags,
                     double energy_step, double elapsed, const RewardWeights& w, const RewardScale& scale) {
  const double a = exec_action.a_lon;
  RewardBreakdown r;
  r.R_velocity = velocity_reward(obs.v, scale.v_min, scale.v_max);
  r.R_energy = a >= 0.0 ? -std::clamp(energy_step / scale.energy_norm, 0.0, 1.0) : 0.0;
  r.R_time = -elapsed;
  r.R_lanechange = flags.lane_changed ? -0.1 : 0.0;
  r.R_danger = flags.danger ? -0.5 : 0.0;
  r.R_GP = green_pass_reward(obs.v, a, obs.d_r, obs.phase_remaining(), observed_phase(obs));
  r.total = w.velocity * r.R_velocity + w.energy * r.R_energy + w.time * r.R_time + w.lane_change * r.R_lanechange +
            w.danger * r.R_danger + w.green_pass * r.R_GP;
  return r;
}

double learning_reward(const RewardBreakdown& b, const RewardWeights& w, double step_duration) {
  return w.velocity * b.R_velocity + w.energy * b.R_energy - w.time * step_duration +
         w.lane_change * b.R_lanechange + w.danger * b.R_danger + w.green_pass * b.R_GP;
}

RewardTerms to_terms(const RewardBreakdown& b) {
  return {b.R_velocity, b.R_energy, b.R_time, b.R_lanechange, b.R_danger, b.R_GP};
}

}  // namespace ecodrive
