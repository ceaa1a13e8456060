#include "ecodrive/rules.hpp"

#include <algorithm>

namespace ecodrive {

std::string_view to_string(ActionSource source) {
  switch (source) {
    case ActionSource::RL: return "RL";
    case ActionSource::IDM: return "IDM";
    case ActionSource::EB: return "EB";
    case ActionSource::SiRStop: return "SiRStop";
  }
  return "?";
}

bool is_valid(const RuleConfig& c) {
  return c.a_eb < 0.0 && c.lead_decel > 0.0 && c.stop_margin >= 0.0 && c.sir_trigger > 0.0 && c.stop_standoff >= 0.0 && c.stop_epsilon > 0.0 &&
         c.ego_decel > 0.0 && c.baseline_gap > 0.0 && c.baseline_dwell >= 0.0 && c.dt > 0.0;
}

double eb_policy(double v, const RuleConfig& config) {
  if (v <= 0.0) return 0.0;
  return std::max(config.a_eb, -v / config.dt);
}

bool sir_warning(double d_r, Phase phase, const RuleConfig& config) {
  return d_r > 0.0 && d_r <= config.sir_trigger && phase != Phase::Green;
}

Phase observed_phase(const Observation& obs) {
  if (obs.t_g > 0.0) return Phase::Green;
  if (obs.t_y > 0.0) return Phase::Yellow;
  return Phase::Red;
}

ManagedAction decision_manager(const Observation& obs, const ManagedAction& rl_action, const VehicleState& ego,
                               const VehicleParams& ego_params, const RuleConfig& config) {
  const double v = ego.v;
  const bool has_leader = obs.d_f < config.sensor_range;
  const double trigger =
      config.eb_trigger > 0.0 ? config.eb_trigger : forward_warning_distance(v, obs.v_f, config.ego_decel);
  if (obs.w_f > 0.5 || (has_leader && config.eb_trigger > 0.0 && obs.d_f < trigger)) {
    return {eb_policy(v, config), 0, ActionSource::EB};
  }

  const Phase phase = observed_phase(obs);
  if (sir_warning(obs.d_r, phase, config)) {
    const double room = obs.d_r - config.stop_standoff;
    // Inside the standoff the car is brought to rest outright instead of creeping.
    const double a = room <= config.stop_epsilon ? std::max(-config.ego_decel, -v / config.dt)
                                                  : std::clamp(-v * v / (2.0 * room), -config.ego_decel, 0.0);
    return {a, 0, ActionSource::SiRStop};
  }

  if (phase == Phase::Green && v < config.start_speed && obs.d_r > 0.0 && obs.d_r <= config.start_zone) {
    std::optional<Leader> leader;
    if (has_leader) leader = Leader{obs.d_f, obs.v_f};
    return {idm_acceleration(v, leader, ego_params), 0, ActionSource::IDM};
  }

  ManagedAction passed = rl_action;
  passed.source = ActionSource::RL;
  return passed;
}

double kinematic_gap(double v, double v_f, const RuleConfig& config) {
  const double ego_stop = v * config.dt + v * v / (2.0 * -config.a_eb);
  const double lead_stop = v_f * v_f / (2.0 * config.lead_decel);
  return config.stop_margin + std::max(0.0, ego_stop - lead_stop);
}

bool forward_danger(const Observation& obs, const RuleConfig& config) {
  if (obs.w_f > 0.5) return true;
  return obs.d_f < config.sensor_range && obs.d_f < kinematic_gap(obs.v, obs.v_f, config);
}

SbrResult sbr_filter(const ManagedAction& action, bool w_f, bool w_l, bool w_r, double v, const RuleConfig& config) {
  SbrResult result{action, false, false};
  if ((action.lane_target < 0 && w_l) || (action.lane_target > 0 && w_r)) {
    result.action.lane_target = 0;
    result.danger = true;
  }
  if (w_f) {
    result.action.a_lon = eb_policy(v, config);
    result.action.source = ActionSource::EB;
    result.eb_override = true;
    // EB owns the step; a lateral move would break the zero-acceleration coupling.
    result.action.lane_target = 0;
  }
  return result;
}

bool baseline_condition(double d_f, double v_target, double v_f, const RuleConfig& config) {
  return d_f < config.baseline_gap && v_target > v_f;
}

int baseline_lane_change(const LaneChangeContext& c, const RuleConfig& config) {
  if (!baseline_condition(c.d_f, c.v_target, c.v_f, config)) return 0;
  if (c.dwell < config.baseline_dwell - 1e-9) return 0;
  const bool left_ok = !c.left_blocked && c.left_gap > c.d_f;
  const bool right_ok = !c.right_blocked && c.right_gap > c.d_f;
  if (left_ok && right_ok) return c.left_gap >= c.right_gap ? -1 : 1;
  if (left_ok) return -1;
  if (right_ok) return 1;
  return 0;
}

int BaselineLaneChanger::update(const Observation& obs, double v_target, double left_gap, double right_gap,
                                bool maneuvering) {
  if (maneuvering) {
    dwell_ = 0.0;
    return 0;
  }
  if (baseline_condition(obs.d_f, v_target, obs.v_f, config_)) {
    dwell_ += config_.dt;
  } else {
    dwell_ = 0.0;
    return 0;
  }
  LaneChangeContext context{obs.d_f, obs.v_f, v_target, dwell_, left_gap, right_gap, obs.w_l > 0.5, obs.w_r > 0.5};
  const int direction = baseline_lane_change(context, config_);
  if (direction != 0) dwell_ = 0.0;
  return direction;
}

}  // namespace ecodrive
