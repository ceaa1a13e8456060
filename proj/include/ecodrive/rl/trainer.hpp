#pragma once

#include <functional>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "ecodrive/rl/agent.hpp"
#include "ecodrive/rl/env.hpp"

namespace ecodrive::rl {

/// One row of the training curve, per finished episode.
struct CurveRow {
  long episode = 0;
  long steps = 0;  ///< agent decisions taken so far, including this episode
  double avg_speed = 0.0;
  double energy_J = 0.0;
  double R_GP = 0.0;
  int lane_changes = 0;
  double ret = 0.0;  ///< undiscounted sum of decision rewards
};

struct EvalRow {
  long steps = 0;
  double mean_return = 0.0;
  double mean_energy = 0.0;
  double mean_travel_time = 0.0;
  int collisions = 0;
};

using ScenarioSampler = std::function<ScenarioConfig(std::mt19937_64& rng)>;

/// Entry time uniform over one signal cycle, entry speed uniform in 10..50 kph,
/// fresh traffic seed per episode.
ScenarioSampler random_entry_sampler(const ScenarioConfig& base);

struct TrainHooks {
  std::function<void(const CurveRow&)> on_episode;
  std::function<void(const EvalRow&)> on_eval;
  std::vector<ScenarioConfig> eval_scenarios;  ///< greedy evaluation set; empty disables evaluation
  std::string abort_checkpoint;               ///< written if training throws
  std::uint64_t checkpoint_hash = 0;
};

struct TrainResult {
  Network network;
  std::vector<CurveRow> curve;
  std::vector<EvalRow> evals;
  long steps = 0;
  long target_syncs = 0;
};

TrainResult train(const EnvConfig& env_config, const ScenarioSampler& sampler, const TrainConfig& config,
                  const TrainHooks& hooks = {});

void write_curve_csv(std::ostream& out, const std::vector<CurveRow>& rows);
std::vector<CurveRow> read_curve_csv(std::istream& in);

}  // namespace ecodrive::rl
