#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ecodrive/world/signal.hpp"

namespace ecodrive {

struct RewardTerms {
  double velocity = 0.0;
  double energy = 0.0;
  double time = 0.0;
  double lane_change = 0.0;
  double danger = 0.0;
  double green_pass = 0.0;
};

struct TrajectoryRecord {
  double t = 0.0;
  double x_lon = 0.0;
  int lane = 0;
  double v = 0.0;
  double a = 0.0;
  Phase phase = Phase::Green;
  double T_r = 0.0;
  double d_f = 0.0;
  double v_f = 0.0;
  int w_f = 0;
  int w_l = 0;
  int w_r = 0;
  double energy_step_J = 0.0;
  double reward = 0.0;
  std::optional<RewardTerms> terms;  ///< written only by verbose logs
};

/// Per-step record of one ego journey.
struct TrajectoryLog {
  std::vector<TrajectoryRecord> records;
  bool verbose = false;

  bool empty() const { return records.empty(); }
  std::size_t size() const { return records.size(); }
};

void write_csv(std::ostream& out, const TrajectoryLog& log);
TrajectoryLog read_trajectory_csv(std::istream& in);

Phase parse_phase(const std::string& text);

}  // namespace ecodrive
