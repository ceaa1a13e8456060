#include "ecodrive/episode.hpp"

#include <cmath>
#include <stdexcept>

namespace ecodrive {

std::string_view to_string(EpisodeStatus status) {
  switch (status) {
    case EpisodeStatus::Running: return "running";
    case EpisodeStatus::Success: return "ok";
    case EpisodeStatus::Collision: return "collision";
    case EpisodeStatus::Timeout: return "timeout";
    case EpisodeStatus::Infeasible: return "infeasible";
  }
  return "?";
}

EpisodeStatus parse_status(std::string_view text) {
  for (auto s : {EpisodeStatus::Running, EpisodeStatus::Success, EpisodeStatus::Collision, EpisodeStatus::Timeout,
                 EpisodeStatus::Infeasible}) {
    if (to_string(s) == text) return s;
  }
  throw std::runtime_error("unknown episode status '" + std::string(text) + "'");
}

ScenarioConfig cell_scenario(const ScenarioConfig& base, double entry_time, double entry_speed_kph,
                             std::uint64_t seed) {
  ScenarioConfig s = base;
  s.entry_time_offset = entry_time;
  s.entry_speed = std::min(kph(entry_speed_kph), s.speed_limit);
  s.seed = seed;
  const double cycle = s.signal.cycle();
  double offset = std::fmod(entry_time - s.warmup, cycle);
  if (offset < 0.0) offset += cycle;
  s.signal.phase_offset = offset;
  return s;
}

Episode::Episode(const EpisodeConfig& config) : config_(config) {
  const auto& sc = config.scenario;
  scale_ = make_reward_scale(sc.speed_limit, ego_params(sc.speed_limit).a_max, config.energy, sc.dt);
  world_ = make_world(sc);
  const auto warmup_steps = static_cast<long>(std::llround(sc.warmup / sc.dt));
  for (long k = 0; k < warmup_steps; ++k) advance(world_, EgoCommand{});
  insert_ego(world_, sc.ego_lane, sc.entry_speed);
  for (const auto& b : sc.blockers) place_blocker(world_, b);
  obs_ = observe(world_);
  log_.verbose = config.verbose_log;
}

RewardBreakdown Episode::step(const ManagedAction& executed, bool danger) {
  if (finished()) throw std::logic_error("episode: step after the episode finished");
  advance(world_, EgoCommand{executed.a_lon, executed.lane_target});
  ++steps_;
  obs_ = observe(world_);
  const VehicleState& ego = world_.ego;
  const double dt = world_.config.dt;
  const double e = step_energy(ego.v, ego.accel, config_.energy, dt, config_.regen);
  energy_ += e;
  speed_sum_ += ego.v;

  RewardFlags flags{world_.ego_started_lane_change, danger};
  const RewardBreakdown reward = lstr(obs_, executed, flags, e, elapsed(), config_.weights, scale_);
  r_gp_sum_ += reward.R_GP;

  TrajectoryRecord rec;
  rec.t = elapsed();
  rec.x_lon = ego.x_lon;
  rec.lane = ego.lane;
  rec.v = ego.v;
  rec.a = ego.accel;
  rec.phase = world_.phase;
  rec.T_r = world_.remaining;
  rec.d_f = obs_.d_f;
  rec.v_f = obs_.v_f;
  rec.w_f = obs_.w_f > 0.5;
  rec.w_l = obs_.w_l > 0.5;
  rec.w_r = obs_.w_r > 0.5;
  rec.energy_step_J = e;
  rec.reward = reward.total;
  if (log_.verbose) rec.terms = to_terms(reward);
  log_.records.push_back(rec);

  if (world_.collision) {
    status_ = EpisodeStatus::Collision;
  } else if (ego.x_lon >= world_.config.geometry.end()) {
    status_ = EpisodeStatus::Success;
    travel_time_ = elapsed();
  } else if (elapsed() >= world_.config.timeout - 1e-9) {
    status_ = EpisodeStatus::Timeout;
  }
  return reward;
}

}  // namespace ecodrive
