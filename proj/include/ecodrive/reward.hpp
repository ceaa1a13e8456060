#pragma once

#include "ecodrive/energy.hpp"
#include "ecodrive/rules.hpp"
#include "ecodrive/trajectory.hpp"
#include "ecodrive/world/world.hpp"

namespace ecodrive {

struct RewardWeights {
  double velocity = 2.0;
  double energy = 0.1;
  double time = 0.002;
  double lane_change = 3.0;
  double danger = 1.0;
  double green_pass = 0.1;
};

bool is_valid(const RewardWeights& weights);

struct RewardBreakdown {
  double R_velocity = 0.0;
  double R_energy = 0.0;
  double R_time = 0.0;
  double R_lanechange = 0.0;
  double R_danger = 0.0;
  double R_GP = 0.0;
  double total = 0.0;
};

struct RewardFlags {
  bool lane_changed = false;
  bool danger = false;
};

/// Normalisation bounds shared by every reward evaluation in an episode.
struct RewardScale {
  double v_min = 0.0;
  double v_max = kph(50.0);
  double energy_norm = 1.0;  ///< step energy at (v_max, a_max); maps R_energy into [-1, 0]
};

RewardScale make_reward_scale(double v_max, double a_max, const EnergyParams& energy, double dt);

/// (v - v_min) / (v_max - v_min), clamped to [0, 1].
double velocity_reward(double v, double v_min, double v_max);

/// Green-pass shaping: compares the distance coverable before the phase ends
/// (v * T_r) with the distance left to the stop line. Zero past the line.
double green_pass_reward(double v, double a, double d_r, double T_r, Phase phase);

/// Weighted long/short-term reward of one step. R_time carries the accumulated
/// elapsed time; `exec_action.a_lon` is the acceleration judged by the
/// energy and green-pass terms.
RewardBreakdown lstr(const Observation& obs, const ManagedAction& exec_action, const RewardFlags& flags,
                     double energy_step, double elapsed, const RewardWeights& weights, const RewardScale& scale);

/// The total with the time term replaced by its per-step increment -w_t * step_duration.
double learning_reward(const RewardBreakdown& breakdown, const RewardWeights& weights, double step_duration);

RewardTerms to_terms(const RewardBreakdown& breakdown);

}  // namespace ecodrive
