#pragma once

#include <string_view>

#include "ecodrive/world/vehicle.hpp"
#include "ecodrive/world/world.hpp"

namespace ecodrive {

enum class ActionSource { RL, IDM, EB, SiRStop };

std::string_view to_string(ActionSource source);

/// A composite command. A lateral move is only ever paired with zero
/// longitudinal acceleration.
struct ManagedAction {
  double a_lon = 0.0;
  int lane_target = 0;
  ActionSource source = ActionSource::RL;
};

struct RuleConfig {
  double a_eb = -5.0;               ///< emergency-braking deceleration [m/s^2]
  double eb_trigger = 0.0;          ///< front distance that fires EB; <= 0 means "use W_d"
  double sir_trigger = 60.0;        ///< Stop-in-Red trigger distance before the line [m]
  double stop_standoff = 2.0;       ///< SiR stopping point before the line [m]
  double stop_epsilon = 0.1;        ///< distance inside the standoff at which SiR stops the car outright [m]
  double ego_decel = 3.0;           ///< ego comfort/maximum deceleration [m/s^2]
  double start_speed = 0.5;         ///< "stopped" threshold for the green-start rule [m/s]
  double start_zone = 5.0;          ///< distance from the line counted as "at the line" [m]
  double baseline_gap = 5.0;        ///< baseline lane change: front-gap threshold [m]
  double baseline_dwell = 3.0;      ///< baseline lane change: required persistence [s]
  double sensor_range = 100.0;      ///< front gaps at this value mean "no leader" [m]
  double lead_decel = 6.0;          ///< hardest braking assumed for the leader [m/s^2]
  double stop_margin = 1.0;         ///< standstill gap kept by the kinematic check [m]
  double dt = 0.02;
};

bool is_valid(const RuleConfig& config);

/// Emergency braking, never reversing within one step.
double eb_policy(double v, const RuleConfig& config);

/// True inside the trigger area while the signal shows anything but green.
bool sir_warning(double d_r, Phase phase, const RuleConfig& config);

/// Phase class as seen through the observation's phase-time slots.
Phase observed_phase(const Observation& obs);

/// Priority arbitration: EB, then Stop-in-Red, then the green-start IDM rule,
/// then the learned action.
ManagedAction decision_manager(const Observation& obs, const ManagedAction& rl_action, const VehicleState& ego,
                               const VehicleParams& ego_params, const RuleConfig& config);

/// Gap needed to stop behind a leader that brakes as hard as lead_decel while
/// the ego brakes at a_eb one step late.
double kinematic_gap(double v, double v_f, const RuleConfig& config);

/// Forward danger seen by the SBR gate: the W_d warning or a gap below kinematic_gap.
bool forward_danger(const Observation& obs, const RuleConfig& config);

struct SbrResult {
  ManagedAction action;
  bool danger = false;       ///< a requested lateral move was vetoed by a side warning
  bool eb_override = false;  ///< the longitudinal part was replaced by EB
};

/// Final safety gate: w_f forces EB, a lateral move toward a warned side is cancelled.
SbrResult sbr_filter(const ManagedAction& action, bool w_f, bool w_l, bool w_r, double v, const RuleConfig& config);

struct LaneChangeContext {
  double d_f = 0.0;
  double v_f = 0.0;
  double v_target = 0.0;
  double dwell = 0.0;  ///< how long the trigger condition has held [s]
  double left_gap = 0.0;
  double right_gap = 0.0;
  bool left_blocked = false;
  bool right_blocked = false;
};

/// Trigger condition of the baseline lane-change rule (before the dwell test).
bool baseline_condition(double d_f, double v_target, double v_f, const RuleConfig& config);

/// Rule-based lateral control used by the IDM and Graph baselines.
/// Returns -1/+1 toward the unblocked adjacent lane with the larger front gap, or 0.
int baseline_lane_change(const LaneChangeContext& context, const RuleConfig& config);

/// Dwell-timer bookkeeping for baseline_lane_change; one per episode.
class BaselineLaneChanger {
 public:
  explicit BaselineLaneChanger(RuleConfig config) : config_(config) {}

  /// Call once per physics step; returns the lane target to issue now.
  int update(const Observation& obs, double v_target, double left_gap, double right_gap, bool maneuvering);

  double dwell() const { return dwell_; }

 private:
  RuleConfig config_;
  double dwell_ = 0.0;
};

}  // namespace ecodrive
