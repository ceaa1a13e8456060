#pragma once

#include <optional>
#include <string>

#include "ecodrive/episode.hpp"
#include "ecodrive/gbtpa.hpp"
#include "ecodrive/harness/config.hpp"
#include "ecodrive/rl/agent.hpp"

namespace ecodrive::harness {

struct MetricsRow {
  Method method = Method::IDM;
  double C = 0.0;  ///< entry time within the cycle [s]
  double S = 0.0;  ///< entry speed [kph]
  int seed = 0;    ///< seed index within the cell
  double travel_time = 0.0;
  double energy = 0.0;
  int lane_changes = 0;
  int collisions = 0;
  EpisodeStatus status = EpisodeStatus::Running;

  bool operator==(const MetricsRow&) const = default;
};

/// Sort key: method, C, S, seed.
bool row_less(const MetricsRow& a, const MetricsRow& b);

struct RunOptions {
  bool safety_filter = true;  ///< SBR gate; the Graph governor is always on
  bool verbose_log = false;
};

struct EpisodeResult {
  MetricsRow row;
  TrajectoryLog log;
  std::optional<gbtpa::PlannedTrajectory> plan;
};

/// Runs one method on one fully specified scenario. HRL needs `network`.
EpisodeResult run_scenario(Method method, const ScenarioConfig& scenario, const AppConfig& config,
                           const rl::Network* network, const RunOptions& options = {});

/// Runs one grid cell realisation: scenario built from (C, S) and the cell seed.
EpisodeResult run_episode(Method method, double C, double S_kph, int seed_index, const AppConfig& config,
                          const rl::Network* network, const RunOptions& options = {});

/// Plan the Graph baseline would follow for this scenario, from the ego's entry state.
gbtpa::PlannedTrajectory plan_for(const WorldState& world, const AppConfig& config);

}  // namespace ecodrive::harness
