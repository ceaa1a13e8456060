// Acceptance run: one PASS/FAIL line per criterion. Tolerances are pinned below.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "ecodrive/harness/config.hpp"
#include "ecodrive/harness/grid.hpp"
#include "ecodrive/harness/runner.hpp"
#include "ecodrive/rl/checkpoint.hpp"
#include "ecodrive/rl/trainer.hpp"
#include "gbtpa_oracle.hpp"
#include "idm_oracle.hpp"
#include "reward_oracle.hpp"
#include "rl_checks.hpp"

using namespace ecodrive;
using namespace ecodrive::harness;

namespace {

constexpr double kIdmTol = 1e-9;
constexpr double kFreeFlowBand = 0.1;  // m/s
constexpr double kFreeFlowLimit = 60.0;  // s
constexpr double kIdmRuntime = 1.0;  // s
constexpr double kLstrTol = 1e-9;
constexpr double kDuelingTol = 1e-6;
constexpr double kGradientTol = 1e-4;
constexpr double kChiSquareP = 0.01;
constexpr long kReplayDraws = 100000;
constexpr double kWeightTol = 1e-12;
constexpr long kMaxEnumeratedPaths = 10000;
constexpr double kGbtpaRuntime = 60.0;  // s
constexpr double kCorridorShare = 0.95;
constexpr int kCorridorWindow = 100;  // episodes
constexpr int kCorridorViolations = 1;
constexpr double kCorridorRuntime = 900.0;  // s
constexpr long kSafetyTrainSteps = 50000;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buffer[512];
  std::snprintf(buffer, sizeof buffer, format, args...);
  return buffer;
}

// Criterion 1 -------------------------------------------------------------

// A lone car of the given class released from rest on an empty, always-green road.
double world_settle_time(VehicleType type) {
  ScenarioConfig sc;
  sc.flow_rate = 0.0;
  sc.warmup = 0.0;
  sc.signal = SignalTiming::always_green();
  auto world = make_world(sc);
  insert_ego(world, 4, 0.0);
  VehicleState car;
  car.id = world.next_id++;
  car.type = type;
  car.lane = 0;
  car.x_lon = 10.0;
  car.next_lateral_decision = INFINITY;
  world.others.push_back(car);
  const double v_tar = background_params(type).v_tar;
  while (world.clock() <= kFreeFlowLimit) {
    const auto it = std::find_if(world.others.begin(), world.others.end(), [&](const auto& s) { return s.id == car.id; });
    if (it == world.others.end()) return INFINITY;
    if (std::abs(it->v - v_tar) < kFreeFlowBand) return world.clock();
    advance(world, {0.0, 0});
  }
  return INFINITY;
}

Verdict idm_correctness() {
  const auto start = Clock::now();
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> type(0, 4);
  std::uniform_real_distribution<double> speed(0.0, 14.0), gap(0.5, 120.0), delta(-8.0, 8.0);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const auto& p = background_params(kBackgroundTypes[static_cast<std::size_t>(type(rng))]);
    const double v = speed(rng), s = gap(rng), v_lead = std::max(0.0, v - delta(rng));
    worst = std::max(worst, std::abs(idm_acceleration(v, Leader{s, v_lead}, p) - oracle::idm_interaction(v, s, v_lead, p)));
    worst = std::max(worst, std::abs(idm_acceleration(v, std::nullopt, p) - oracle::idm_free(v, p)));
  }
  double slowest = 0.0;
  for (VehicleType t : kBackgroundTypes) slowest = std::max(slowest, world_settle_time(t));
  const double runtime = seconds_since(start);
  return {worst <= kIdmTol && slowest <= kFreeFlowLimit && runtime < kIdmRuntime,
          fmt("max |a - oracle| %.2e over 20 cases, slowest free-flow settle %.2f s, %.3f s", worst, slowest, runtime)};
}

// Criterion 2 -------------------------------------------------------------

Verdict safety(const std::vector<MetricsRow>& rows, double runtime) {
  int collisions = 0, timeouts = 0;
  for (const auto& r : rows) {
    collisions += r.collisions;
    timeouts += r.status == EpisodeStatus::Timeout ? 1 : 0;
  }
  return {collisions == 0 && rows.size() == 450,
          fmt("%zu episodes, %d collisions, %d timeouts, %.1f s", rows.size(), collisions, timeouts, runtime)};
}

// Criterion 3 -------------------------------------------------------------

Verdict reward_exactness() {
  int table_misses = 0;
  const auto cases = oracle::green_pass_cases();
  for (const auto& c : cases)
    if (green_pass_reward(c.v, c.a, c.d_r, c.T_r, c.phase) != c.expected) ++table_misses;

  std::mt19937_64 rng(303);
  const RewardScale scale = make_reward_scale(13.89, 3.0, EnergyParams{}, 0.02);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const auto in = oracle::random_lstr_input(rng);
    const auto r = lstr(in.obs, {in.a, 0, ActionSource::RL}, in.flags, in.energy, in.elapsed, in.weights, scale);
    worst = std::max(worst, std::abs(r.total - oracle::lstr_total(in, scale.energy_norm)));
  }
  return {table_misses == 0 && worst <= kLstrTol,
          fmt("%d/%zu table entries differ, max |LSTR - oracle| %.2e over 50 inputs", table_misses, cases.size(), worst)};
}

// Criterion 4 -------------------------------------------------------------

Verdict dueling_and_gradients() {
  const double identity = checks::dueling_identity_error(100, 404);
  const double gradient = checks::gradient_check_error(405);
  return {identity <= kDuelingTol && gradient <= kGradientTol,
          fmt("identity error %.2e, max relative gradient error %.2e", identity, gradient)};
}

// Criterion 5 -------------------------------------------------------------

Verdict replay_statistics() {
  const double p_uniform = checks::replay_sampling_p(std::vector<double>(16, 1.0), kReplayDraws, 501);
  std::vector<double> skewed(16, 1.0);
  skewed[5] = 10.0;
  const double p_skewed = checks::replay_sampling_p(skewed, kReplayDraws, 502);

  rl::ReplayConfig cfg;
  cfg.capacity = 64;
  rl::PrioritizedReplay replay(2, cfg);
  for (int i = 0; i < 64; ++i) replay.add({{0.0F, 0.0F}, 0, 0.0F, {0.0F, 0.0F}, false});
  for (std::size_t i = 0; i < 64; ++i) replay.set_priority(i, 1.0);
  std::mt19937_64 rng(503);
  const auto batch = replay.sample(4096, 1.0, rng);
  double worst = 0.0;
  for (double w : batch.weights) worst = std::max(worst, std::abs(w - 1.0));
  return {p_uniform > kChiSquareP && p_skewed > kChiSquareP && worst <= kWeightTol,
          fmt("chi-square p uniform %.3f, 10:1 %.3f; max |w - 1| at beta 1 %.1e", p_uniform, p_skewed, worst)};
}

// Criterion 6 -------------------------------------------------------------

Verdict gbtpa_optimality() {
  const auto start = Clock::now();
  int compared = 0, mismatches = 0;
  for (double line : {4.0, 6.0, 8.0}) {
    for (double t0 : {0.0, 2.0, 4.5, 7.0}) {
      for (int j0 : {1, 2, 3}) {
        const auto g = gbtpa::build_graph(oracle::small_problem(line, t0), oracle::small_grid());
        const auto brute = oracle::BruteForce(g).run(j0);
        if (brute.paths > kMaxEnumeratedPaths) continue;
        ++compared;
        const auto dp = gbtpa::plan(g, g.speed(j0));
        if (dp.feasible != brute.found || (brute.found && dp.energy != brute.energy)) ++mismatches;
      }
    }
  }

  AppConfig cfg;
  cfg.scenario.flow_rate = 0.0;
  int plans = 0, outside_green = 0, worse = 0;
  double worst_margin = INFINITY;
  for (double C : cfg.grid.entry_times) {
    for (double S : cfg.grid.entry_speeds) {
      const auto idm = run_episode(Method::IDM, C, S, 0, cfg, nullptr);
      const auto graph = run_episode(Method::Graph, C, S, 0, cfg, nullptr);
      ++plans;
      // The phase seen on the step the car passes the stop line.
      const auto& recs = graph.log.records;
      const auto crossing = std::find_if(recs.begin(), recs.end(), [&](const auto& r) {
        return r.x_lon >= cfg.scenario.geometry.stop_line;
      });
      if (!graph.plan->feasible || crossing == recs.end() || crossing->phase != Phase::Green) ++outside_green;
      if (graph.row.status != EpisodeStatus::Success || graph.row.energy > idm.row.energy) ++worse;
      worst_margin = std::min(worst_margin, idm.row.energy - graph.row.energy);
    }
  }
  const double runtime = seconds_since(start);
  return {compared > 0 && mismatches == 0 && outside_green == 0 && worse == 0 && runtime < kGbtpaRuntime,
          fmt("%d enumerable lattices, %d DP mismatches; %d/%d plans outside green; %d cells where GBTPA > IDM "
              "(smallest saving %.0f J); %.1f s",
              compared, mismatches, outside_green, plans, worse, worst_margin, runtime)};
}

// Criterion 7 -------------------------------------------------------------

rl::EnvConfig corridor_env() {
  rl::EnvConfig env;
  auto& sc = env.episode.scenario;
  sc.flow_rate = 0.0;
  sc.warmup = 0.0;
  sc.signal = SignalTiming::always_green();
  env.decision_interval = 25;
  return env;
}

rl::TrainConfig corridor_training() {
  rl::TrainConfig tc;
  tc.network.stream = {64, 64};
  tc.total_steps = 50000;
  tc.warmup = 1000;
  tc.target_sync = 250;
  tc.batch = 32;
  tc.learning_rate = 5e-4;
  tc.gamma = 0.95;
  tc.eval_every = 0;
  tc.replay.capacity = 50000;
  tc.seed = 1;
  return tc;
}

Verdict learning_sanity(const std::string& out_dir) {
  const auto start = Clock::now();
  const rl::EnvConfig env = corridor_env();
  const rl::TrainConfig tc = corridor_training();
  std::vector<ScenarioConfig> probes;
  for (double s : {10.0, 30.0, 50.0}) {
    ScenarioConfig sc = env.episode.scenario;
    sc.entry_speed = kph(s);
    probes.push_back(sc);
  }
  rl::DrivingEnv probe_env(env);
  const auto mean_return = [&](const rl::Policy& policy) {
    double sum = 0.0;
    for (const auto& sc : probes) sum += rl::run_policy(probe_env, sc, policy, tc.gamma).discounted_return;
    return sum / static_cast<double>(probes.size());
  };

  double best = -INFINITY;
  int best_action = 0;
  for (int a = 0; a < rl::kActionCount; ++a) {
    const double r = mean_return([a](const std::vector<float>&) { return a; });
    if (r > best) {
      best = r;
      best_action = a;
    }
  }

  const rl::ScenarioSampler sampler = [base = env.episode.scenario](std::mt19937_64& rng) {
    ScenarioConfig sc = base;
    sc.entry_speed = kph(std::uniform_real_distribution<double>(10.0, 50.0)(rng));
    return sc;
  };
  const auto trained = rl::train(env, sampler, tc);
  const double learned = mean_return([&](const std::vector<float>& s) { return rl::greedy(rl::q_values(trained.network, s)); });

  // Skip the episodes that finished inside the warm-up, then compare consecutive windows.
  std::size_t first = 0;
  while (first < trained.curve.size() && trained.curve[first].steps <= tc.warmup) ++first;
  std::vector<double> windows;
  for (std::size_t i = first; i + kCorridorWindow <= trained.curve.size(); i += kCorridorWindow) {
    double sum = 0.0;
    for (std::size_t k = i; k < i + kCorridorWindow; ++k) sum += trained.curve[k].avg_speed;
    windows.push_back(sum / kCorridorWindow);
  }
  int violations = 0;
  for (std::size_t i = 1; i < windows.size(); ++i) violations += windows[i] < windows[i - 1] ? 1 : 0;

  if (!out_dir.empty()) {
    std::ofstream curve(out_dir + "/corridor_curve.csv");
    rl::write_curve_csv(curve, trained.curve);
  }
  const double share = best > 0.0 ? learned / best : (learned >= best ? 1.0 : 0.0);
  std::string speeds;
  for (double w : windows) speeds += fmt(" %.2f", w);
  const double runtime = seconds_since(start);
  return {learned >= best - (1.0 - kCorridorShare) * std::abs(best) && windows.size() >= 2 &&
              violations <= kCorridorViolations && runtime <= kCorridorRuntime,
          fmt("return %.3f vs best constant action %d at %.3f (%.1f%%); window speeds%s m/s, %d decreases; %.1f s",
              learned, best_action, best, 100.0 * share, speeds.c_str(), violations, runtime)};
}

// Criterion 8 -------------------------------------------------------------

struct HrlOptions {
  std::string config;
  std::string checkpoint;
  long steps = 500000;
};

Verdict directional(const HrlOptions& opt, const std::string& out_dir) {
  const auto start = Clock::now();
  AppConfig cfg = opt.config.empty() ? AppConfig{} : load_config(opt.config);
  const rl::EnvConfig env = env_config(cfg);
  const auto hash = rl::config_hash(cfg.train.network, env.stack, env.features);
  std::optional<rl::Network> network;
  if (!opt.checkpoint.empty()) {
    network = rl::load_checkpoint(opt.checkpoint, hash).network;
  } else {
    cfg.train.total_steps = opt.steps;
    network = rl::train(env, rl::random_entry_sampler(cfg.scenario), cfg.train).network;
    if (!out_dir.empty()) rl::save_checkpoint(out_dir + "/hrl.ckpt", *network, hash);
  }
  GridSpec spec = cfg.grid;
  spec.methods = {Method::IDM, Method::HRL};
  const auto rows = grid_eval(cfg, spec, &*network);
  const auto cells = summarize(rows);
  const auto imps = improvement_table(cells, spec, Method::HRL, Method::IDM);
  double sum = 0.0;
  int n = 0;
  for (const auto& i : imps) {
    if (i.missing) continue;
    sum += i.energy_imp;
    ++n;
  }
  const double mean = n > 0 ? sum / n : NAN;
  std::string per_c;
  for (const auto& e : entry_averages(cells, imps, spec)) per_c += fmt(" C%g %+.1f%%", e.C, e.energy_imp);
  return {n > 0 && mean > 0.0, fmt("mean energy improvement over IDM %+.2f%% across %d cells;%s; %.0f s", mean, n,
                                   per_c.c_str(), seconds_since(start))};
}

// Criterion 9 -------------------------------------------------------------

std::string metrics_text(const std::vector<MetricsRow>& rows) {
  std::ostringstream out;
  write_metrics_csv(out, rows);
  return out.str();
}

Verdict determinism(const std::string& first, const std::string& second, const std::string& out_dir) {
  if (!out_dir.empty()) {
    std::ofstream(out_dir + "/grid_run1.csv", std::ios::binary) << first;
    std::ofstream(out_dir + "/grid_run2.csv", std::ios::binary) << second;
  }
  return {!first.empty() && first == second,
          fmt("two grid runs, %zu and %zu bytes, %s", first.size(), second.size(),
              first == second ? "identical" : "different")};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> only;
  std::string out_dir;
  HrlOptions hrl;
  app.add_option("--only", only, "Criteria to run (default: all but 8)")->delimiter(',')->check(CLI::Range(1, 9));
  app.add_option("--out-dir", out_dir, "Directory for CSV and checkpoint artefacts");
  app.add_option("--config", hrl.config, "YAML configuration for the HRL criteria (2, 8, 9)")->check(CLI::ExistingFile);
  app.add_option("--checkpoint", hrl.checkpoint, "Trained network for criterion 8 instead of training one");
  app.add_option("--train-steps", hrl.steps, "Training steps for criterion 8")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  std::set<int> run(only.begin(), only.end());
  if (run.empty()) run = {1, 2, 3, 4, 5, 6, 7, 9};
  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);

  std::map<int, Verdict> verdicts;
  const auto record = [&](int id, const char* name, const std::function<Verdict()>& check) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %d %-24s %s  %s\n", id, name, v.pass ? "PASS" : "FAIL", v.detail.c_str());
    std::fflush(stdout);
    verdicts[id] = v;
  };

  if (run.count(1)) record(1, "idm", idm_correctness);

  // Criteria 2 and 9 share the full grid. The HRL rows use a briefly trained policy so the agent
  // actually drives through traffic instead of idling at the entrance.
  AppConfig grid_cfg = hrl.config.empty() ? AppConfig{} : load_config(hrl.config);
  grid_cfg.grid.seeds = 5;
  grid_cfg.grid.methods = {Method::IDM, Method::Graph, Method::HRL};
  std::optional<rl::Network> policy;
  std::optional<std::vector<MetricsRow>> grid_rows;
  double grid_runtime = 0.0;
  const auto full_grid = [&]() -> const std::vector<MetricsRow>& {
    if (!grid_rows) {
      const auto start = Clock::now();
      if (!policy) {
        rl::TrainConfig tc = grid_cfg.train;
        tc.total_steps = kSafetyTrainSteps;
        policy = rl::train(env_config(grid_cfg), rl::random_entry_sampler(grid_cfg.scenario), tc).network;
      }
      grid_rows = grid_eval(grid_cfg, grid_cfg.grid, &*policy);
      grid_runtime = seconds_since(start);
    }
    return *grid_rows;
  };

  if (run.count(2)) record(2, "safety", [&] {
    const auto& rows = full_grid();
    return safety(rows, grid_runtime);
  });
  if (run.count(3)) record(3, "reward", reward_exactness);
  if (run.count(4)) record(4, "dueling-gradients", dueling_and_gradients);
  if (run.count(5)) record(5, "replay", replay_statistics);
  if (run.count(6)) record(6, "gbtpa", gbtpa_optimality);
  if (run.count(7)) record(7, "learning", [&] { return learning_sanity(out_dir); });
  if (run.count(8)) record(8, "directional", [&] { return directional(hrl, out_dir); });
  if (run.count(9)) {
    record(9, "determinism", [&] {
      const std::string first = metrics_text(full_grid());
      return determinism(first, metrics_text(grid_eval(grid_cfg, grid_cfg.grid, &*policy)), out_dir);
    });
  }

  const bool ok = std::all_of(verdicts.begin(), verdicts.end(), [](const auto& kv) { return kv.second.pass; });
  return ok ? 0 : 1;
}
