#include "ecodrive/harness/runner.hpp"

#include <stdexcept>
#include <tuple>

#include "ecodrive/rl/env.hpp"

namespace ecodrive::harness {

bool row_less(const MetricsRow& a, const MetricsRow& b) {
  return std::make_tuple(static_cast<int>(a.method), a.C, a.S, a.seed) <
         std::make_tuple(static_cast<int>(b.method), b.C, b.S, b.seed);
}

namespace {

std::optional<Leader> observed_leader(const Observation& obs, double sensor_range) {
  if (obs.d_f >= sensor_range) return std::nullopt;
  return Leader{obs.d_f, obs.v_f};
}

// Applies the SBR gate (if enabled) and advances the episode by one step.
void execute(Episode& ep, ManagedAction action, const RuleConfig& rules, bool safety_filter) {
  const Observation& obs = ep.observation();
  bool danger = false;
  if (safety_filter) {
    const SbrResult gate = sbr_filter(action, forward_danger(obs, rules), obs.w_l > 0.5, obs.w_r > 0.5, ep.world().ego.v, rules);
    action = gate.action;
    danger = gate.danger;
  }
  ep.step(action, danger);
}

int baseline_lateral(BaselineLaneChanger& changer, const Episode& ep, double v_target) {
  const WorldState& w = ep.world();
  return changer.update(ep.observation(), v_target, adjacent_front_gap(w, -1), adjacent_front_gap(w, +1),
                        w.ego.lane_change.has_value());
}

void drive_idm(Episode& ep, const RuleConfig& rules, bool safety_filter) {
  BaselineLaneChanger changer(rules);
  while (!ep.finished()) {
    const WorldState& w = ep.world();
    const Observation& obs = ep.observation();
    std::optional<Leader> line;
    if (obs.d_r <= rules.sensor_range) line = stop_line_leader(obs.d_r, w.ego.v, w.phase, w.ego_params);
    const double a = idm_with_leaders(w.ego.v, observed_leader(obs, rules.sensor_range), line, w.ego_params);
    const int lateral = baseline_lateral(changer, ep, w.config.speed_limit);
    execute(ep, {a, lateral, ActionSource::IDM}, rules, safety_filter);
  }
}

void drive_graph(Episode& ep, const gbtpa::PlannedTrajectory& plan, const AppConfig& config,
                 const RuleConfig& rules, bool safety_filter) {
  BaselineLaneChanger changer(rules);
  while (!ep.finished()) {
    const WorldState& w = ep.world();
    ManagedAction action = gbtpa::follow(plan, w, ep.elapsed(), config.follow);
    const double v_target = gbtpa::reference_at(plan, ep.elapsed(), w.config.speed_limit).v;
    action.lane_target = baseline_lateral(changer, ep, v_target);
    execute(ep, action, rules, safety_filter);
  }
}

MetricsRow summarize(Method method, const ScenarioConfig& sc, const Episode& ep) {
  MetricsRow row;
  row.method = method;
  row.C = sc.entry_time_offset;
  row.S = sc.entry_speed * 3.6;
  row.travel_time = ep.status() == EpisodeStatus::Success ? ep.travel_time() : ep.elapsed();
  row.energy = ep.energy();
  row.lane_changes = ep.lane_changes();
  row.collisions = ep.status() == EpisodeStatus::Collision ? 1 : 0;
  row.status = ep.status();
  return row;
}

}  // namespace

gbtpa::PlannedTrajectory plan_for(const WorldState& world, const AppConfig& config) {
  gbtpa::PlanProblem problem;
  problem.stop_line = world.config.geometry.stop_line - world.ego.x_lon;
  problem.v_max = world.config.speed_limit;
  problem.v_exit = world.config.speed_limit;
  problem.a_max = world.ego_params.a_max;
  problem.b_max = world.ego_params.b_max;
  problem.t0 = world.clock();
  problem.signal = world.config.signal;
  problem.energy = config.energy;
  gbtpa::GridResolution grid = config.graph;
  grid.energy_dt = world.config.dt;
  const gbtpa::StateGraph graph = gbtpa::build_graph(problem, grid);
  return gbtpa::plan(graph, world.ego.v);
}

EpisodeResult run_scenario(Method method, const ScenarioConfig& scenario, const AppConfig& config,
                           const rl::Network* network, const RunOptions& options) {
  RuleConfig rules = config.rules;
  rules.dt = scenario.dt;
  rules.sensor_range = scenario.geometry.sensor_range;
  EpisodeResult result;

  if (method == Method::HRL) {
    if (!network) throw std::invalid_argument("run_episode: HRL needs a network");
    rl::EnvConfig env_cfg = env_config(config);
    env_cfg.safety_filter = options.safety_filter;
    env_cfg.episode.verbose_log = options.verbose_log;
    rl::DrivingEnv env(env_cfg);
    const rl::Network& net = *network;
    rl::run_policy(env, scenario, [&](const std::vector<float>& s) { return rl::greedy(rl::q_values(net, s)); },
                   config.train.gamma);
    result.row = summarize(method, scenario, env.episode());
    result.log = env.episode().log();
    return result;
  }

  EpisodeConfig ec;
  ec.scenario = scenario;
  ec.energy = config.energy;
  ec.weights = config.weights;
  ec.regen = config.regen;
  ec.verbose_log = options.verbose_log;
  Episode ep(ec);
  if (method == Method::IDM) {
    drive_idm(ep, rules, options.safety_filter);
  } else {
    result.plan = plan_for(ep.world(), config);
    drive_graph(ep, *result.plan, config, rules, options.safety_filter);
  }
  result.row = summarize(method, scenario, ep);
  if (result.plan && !result.plan->feasible && result.row.status == EpisodeStatus::Success)
    result.row.status = EpisodeStatus::Infeasible;
  result.log = ep.log();
  return result;
}

EpisodeResult run_episode(Method method, double C, double S_kph, int seed_index, const AppConfig& config,
                          const rl::Network* network, const RunOptions& options) {
  const ScenarioConfig sc =
      cell_scenario(config.scenario, C, S_kph, cell_seed(config.grid.base_seed, C, S_kph, seed_index));
  EpisodeResult r = run_scenario(method, sc, config, network, options);
  r.row.C = C;
  r.row.S = S_kph;
  r.row.seed = seed_index;
  return r;
}

}  // namespace ecodrive::harness
