#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "ecodrive/episode.hpp"
#include "ecodrive/rl/action.hpp"
#include "ecodrive/rl/preprocess.hpp"

namespace ecodrive::rl {

struct EnvConfig {
  EpisodeConfig episode;  ///< energy, weights and logging; the scenario comes with reset()
  RuleConfig rules;
  int decision_interval = 4;  ///< physics steps per agent decision
  StackSpec stack;
  FeatureScale features;
  bool safety_filter = true;
};

struct EnvStep {
  std::vector<float> state;
  double reward = 0.0;
  bool done = false;
  bool terminal = false;  ///< ended by crossing or collision; a timeout still bootstraps
  RewardBreakdown terms;  ///< interval means of the per-step terms
};

/// The hybrid control loop seen by the agent: each decision is held for
/// decision_interval steps, and every step passes the Decision Manager and the
/// SBR gate before it reaches the world.
class DrivingEnv {
 public:
  explicit DrivingEnv(EnvConfig config);

  std::vector<float> reset(const ScenarioConfig& scenario);
  EnvStep step(ActionId action);

  const Episode& episode() const { return *episode_; }
  bool active() const { return episode_.has_value() && !episode_->finished(); }
  const EnvConfig& config() const { return config_; }
  std::vector<float> state() const;

 private:
  EnvConfig config_;
  std::optional<Episode> episode_;
  FrameHistory frames_;
};

/// Outcome of running one policy for a full episode.
struct PolicyOutcome {
  double discounted_return = 0.0;
  double total_reward = 0.0;
  long decisions = 0;
  EpisodeStatus status = EpisodeStatus::Running;
  double travel_time = 0.0;
  double energy = 0.0;
  double avg_speed = 0.0;
};

using Policy = std::function<ActionId(const std::vector<float>& state)>;

PolicyOutcome run_policy(DrivingEnv& env, const ScenarioConfig& scenario, const Policy& policy, double gamma);

}  // namespace ecodrive::rl
