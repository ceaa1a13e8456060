#pragma once

#include <string_view>

#include "ecodrive/energy.hpp"
#include "ecodrive/reward.hpp"
#include "ecodrive/rules.hpp"
#include "ecodrive/trajectory.hpp"
#include "ecodrive/world/world.hpp"

namespace ecodrive {

enum class EpisodeStatus { Running, Success, Collision, Timeout, Infeasible };

std::string_view to_string(EpisodeStatus status);
EpisodeStatus parse_status(std::string_view text);

struct EpisodeConfig {
  ScenarioConfig scenario;
  EnergyParams energy;
  RewardWeights weights;
  bool regen = false;
  bool verbose_log = false;
};

/// Scenario for one grid cell: the ego enters when the signal cycle reads
/// `entry_time` seconds, at `entry_speed_kph`.
ScenarioConfig cell_scenario(const ScenarioConfig& base, double entry_time, double entry_speed_kph,
                             std::uint64_t seed);

/// One ego journey from entry (x=0) to the end of the road. Construction runs
/// the background warm-up and inserts the ego; each step() advances one dt.
class Episode {
 public:
  explicit Episode(const EpisodeConfig& config);

  const WorldState& world() const { return world_; }
  const Observation& observation() const { return obs_; }
  const EpisodeConfig& config() const { return config_; }
  EpisodeStatus status() const { return status_; }
  bool finished() const { return status_ != EpisodeStatus::Running; }

  /// Time since the ego entered [s].
  double elapsed() const { return static_cast<double>(steps_) * world_.config.dt; }
  double travel_time() const { return travel_time_; }
  double energy() const { return energy_; }
  int lane_changes() const { return world_.ego_lane_changes; }
  double r_gp_sum() const { return r_gp_sum_; }
  double speed_sum() const { return speed_sum_; }
  long steps() const { return steps_; }

  const TrajectoryLog& log() const { return log_; }

  /// Executes the final (already arbitrated) command for one step.
  RewardBreakdown step(const ManagedAction& executed, bool danger);

 private:
  EpisodeConfig config_;
  RewardScale scale_;
  WorldState world_;
  Observation obs_;
  EpisodeStatus status_ = EpisodeStatus::Running;
  long steps_ = 0;
  double travel_time_ = 0.0;
  double energy_ = 0.0;
  double r_gp_sum_ = 0.0;
  double speed_sum_ = 0.0;
  TrajectoryLog log_;
};

}  // namespace ecodrive
