#include "ecodrive/rl/trainer.hpp"

#include <iostream>
#include <stdexcept>

#include "ecodrive/csv.hpp"
#include "ecodrive/rl/checkpoint.hpp"

namespace ecodrive::rl {

ScenarioSampler random_entry_sampler(const ScenarioConfig& base) {
  return [base](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> entry(0.0, base.signal.cycle());
    std::uniform_real_distribution<double> speed(10.0, 50.0);
    const double c = entry(rng);
    const double s = speed(rng);
    return cell_scenario(base, c, s, rng());
  };
}

namespace {

EvalRow evaluate(const Network& net, const EnvConfig& env_config, const std::vector<ScenarioConfig>& scenarios,
                 long steps, double gamma) {
  DrivingEnv env(env_config);
  EvalRow row;
  row.steps = steps;
  const Policy policy = [&](const std::vector<float>& s) { return greedy(q_values(net, s)); };
  for (const auto& sc : scenarios) {
    const PolicyOutcome o = run_policy(env, sc, policy, gamma);
    row.mean_return += o.total_reward;
    row.mean_energy += o.energy;
    row.mean_travel_time += o.status == EpisodeStatus::Success ? o.travel_time : sc.timeout;
    row.collisions += o.status == EpisodeStatus::Collision ? 1 : 0;
  }
  const double n = static_cast<double>(scenarios.size());
  row.mean_return /= n;
  row.mean_energy /= n;
  row.mean_travel_time /= n;
  return row;
}

}  // namespace

TrainResult train(const EnvConfig& env_config, const ScenarioSampler& sampler, const TrainConfig& config,
                  const TrainHooks& hooks) {
  validate(config);
  const int inputs = env_config.stack.stack * static_cast<int>(Observation::kSize);
  if (config.network.inputs != inputs) throw std::invalid_argument("train: network input width != stacked frame size");

  std::mt19937_64 rng(config.seed);
  TrainResult result;
  result.network = Network(config.network, config.seed ^ 0x5eedf00dULL);
  Network target = result.network;
  Adam<float> optimizer(result.network, {config.learning_rate});
  PrioritizedReplay replay(static_cast<std::size_t>(inputs), config.replay);
  DrivingEnv env(env_config);

  try {
    long step = 0;
    while (step < config.total_steps) {
      std::vector<float> s = env.reset(sampler(rng));
      double ret = 0.0;
      while (env.active() && step < config.total_steps) {
        const ActionId a = act(result.network, s, epsilon_at(step, config), rng);
        EnvStep r = env.step(a);
        replay.add({s, a, static_cast<float>(r.reward), r.state, r.terminal});
        ret += r.reward;
        ++step;
        if (replay.size() >= static_cast<std::size_t>(std::max<long>(config.warmup, config.batch)) &&
            step % config.train_every == 0) {
          const ReplayBatch batch = replay.sample(static_cast<std::size_t>(config.batch), beta_at(step, config), rng);
          train_step(result.network, target, optimizer, replay, batch, config);
        }
        if (step % config.target_sync == 0) {
          target = result.network;
          ++result.target_syncs;
        }
        if (config.eval_every > 0 && step % config.eval_every == 0 && !hooks.eval_scenarios.empty()) {
          result.evals.push_back(evaluate(result.network, env_config, hooks.eval_scenarios, step, config.gamma));
          if (hooks.on_eval) hooks.on_eval(result.evals.back());
        }
        s = std::move(r.state);
      }
      if (env.active()) break;  // budget ran out mid-episode
      const Episode& ep = env.episode();
      CurveRow row;
      row.episode = static_cast<long>(result.curve.size()) + 1;
      row.steps = step;
      row.avg_speed = ep.steps() > 0 ? ep.speed_sum() / static_cast<double>(ep.steps()) : 0.0;
      row.energy_J = ep.energy();
      row.R_GP = ep.r_gp_sum();
      row.lane_changes = ep.lane_changes();
      row.ret = ret;
      result.curve.push_back(row);
      if (hooks.on_episode) hooks.on_episode(row);
    }
    result.steps = step;
  } catch (...) {
    if (!hooks.abort_checkpoint.empty()) {
      try {
        save_checkpoint(hooks.abort_checkpoint, result.network, hooks.checkpoint_hash);
        std::cerr << "training aborted; checkpoint written to " << hooks.abort_checkpoint << '\n';
      } catch (const std::exception& e) {
        std::cerr << "training aborted and the checkpoint could not be written: " << e.what() << '\n';
      }
    }
    throw;
  }
  return result;
}

void write_curve_csv(std::ostream& out, const std::vector<CurveRow>& rows) {
  out << "episode,steps,avg_speed,energy_J,R_GP,lane_changes,return\n";
  for (const auto& r : rows) {
    out << r.episode << ',' << r.steps << ',' << csv::num(r.avg_speed) << ',' << csv::num(r.energy_J) << ','
        << csv::num(r.R_GP) << ',' << r.lane_changes << ',' << csv::num(r.ret) << '\n';
  }
}

std::vector<CurveRow> read_curve_csv(std::istream& in) {
  const auto header = csv::read_header(in);
  if (header.size() != 7 || header[0] != "episode") throw std::runtime_error("curve csv: unexpected header");
  std::vector<CurveRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = csv::split(line);
    if (f.size() != 7) throw std::runtime_error("curve csv: ragged row");
    rows.push_back({csv::to_int(f[0]), csv::to_int(f[1]), csv::to_double(f[2]), csv::to_double(f[3]),
                    csv::to_double(f[4]), static_cast<int>(csv::to_int(f[5])), csv::to_double(f[6])});
  }
  return rows;
}

}  // namespace ecodrive::rl
