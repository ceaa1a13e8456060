#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <regex>
#include <sstream>
#include <string>

#include "ecodrive/csv.hpp"
#include "ecodrive/harness/config.hpp"
#include "ecodrive/harness/grid.hpp"
#include "ecodrive/harness/plot.hpp"
#include "ecodrive/harness/runner.hpp"
#include "ecodrive/rl/checkpoint.hpp"
#include "ecodrive/rl/trainer.hpp"

namespace fs = std::filesystem;
using namespace ecodrive;
using namespace ecodrive::harness;

namespace {

struct Cell {
  double C = 0.0;
  double S = 0.0;
};

Cell parse_cell(const std::string& text) {
  static const std::regex pattern(R"(C(\d+(?:\.\d+)?):S(\d+(?:\.\d+)?))", std::regex::icase);
  std::smatch m;
  if (!std::regex_match(text, m, pattern)) throw CLI::ValidationError("--cell", "expected the form C30:S20");
  return {std::stod(m[1]), std::stod(m[2])};
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

// The network for HRL runs; without a checkpoint a seeded untrained network stands in.
std::optional<rl::Network> hrl_network(const AppConfig& config, const std::string& override_path) {
  const std::string path = override_path.empty() ? config.checkpoint : override_path;
  if (path.empty()) {
    std::cerr << "note: no HRL checkpoint given; using an untrained network (seed " << config.train.seed << ")\n";
    return rl::Network(config.train.network, config.train.seed);
  }
  return rl::load_checkpoint(path, rl::config_hash(config.train.network, rl::StackSpec{}, rl::FeatureScale{}))
      .network;
}

bool uses_hrl(const std::vector<Method>& methods) {
  return std::find(methods.begin(), methods.end(), Method::HRL) != methods.end();
}

int count_collisions(const std::vector<MetricsRow>& rows) {
  int n = 0;
  for (const auto& r : rows) n += r.collisions;
  return n;
}

void write_reports(const fs::path& dir, const std::vector<MetricsRow>& rows, const GridSpec& spec) {
  const auto cells = summarize(rows);
  auto summary = open_out(dir / "grid_summary.csv");
  write_summary_csv(summary, cells);

  std::vector<std::pair<Method, Method>> pairs;
  auto has = [&](Method m) { return std::find(spec.methods.begin(), spec.methods.end(), m) != spec.methods.end(); };
  for (Method m : {Method::Graph, Method::HRL})
    if (has(m) && has(Method::IDM)) pairs.emplace_back(m, Method::IDM);
  if (has(Method::HRL) && has(Method::Graph)) pairs.emplace_back(Method::HRL, Method::Graph);

  auto entry = open_out(dir / "entry_averages.csv");
  bool header = true;
  for (const auto& [m, ref] : pairs) {
    const auto imps = improvement_table(cells, spec, m, ref);
    const std::string tag = std::string(to_string(m)) + "_vs_" + std::string(to_string(ref));
    auto imp_out = open_out(dir / ("improvement_" + tag + ".csv"));
    write_improvement_csv(imp_out, imps);
    auto he = open_out(dir / ("heatmap_energy_" + tag + ".csv"));
    write_heatmap_csv(he, heatmap(imps, spec, true), spec);
    auto ht = open_out(dir / ("heatmap_time_" + tag + ".csv"));
    write_heatmap_csv(ht, heatmap(imps, spec, false), spec);

    std::ostringstream table;
    write_entry_csv(table, entry_averages(cells, imps, spec));
    std::string text = table.str();
    if (!header) text = text.substr(text.find('\n') + 1);
    entry << text;
    header = false;

    double e = 0.0, t = 0.0;
    int n = 0;
    for (const auto& r : imps) {
      if (r.missing) continue;
      e += r.energy_imp;
      t += r.time_imp;
      ++n;
    }
    if (n > 0) {
      std::printf("%-6s vs %-6s  energy %+7.2f%%  travel time %+7.2f%%  (%d cells)\n", std::string(to_string(m)).c_str(),
                  std::string(to_string(ref)).c_str(), e / n, t / n, n);
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Eco-driving at a signalised intersection: simulator, hybrid RL agent and baselines"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
  app.add_option("--config", config_path, "YAML configuration file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Base seed for traffic and training");
  app.add_option("--out-dir", out_dir, "Directory for CSV outputs");

  auto* train_cmd = app.add_subcommand("train", "Train the HRL agent");
  long steps = -1;
  std::string ckpt_out;
  train_cmd->add_option("--steps", steps, "Total agent steps (overrides the config)");
  train_cmd->add_option("--checkpoint", ckpt_out, "Output checkpoint path (default <out-dir>/hrl.ckpt)");

  auto* eval_cmd = app.add_subcommand("eval", "Run one method on one grid cell");
  std::string method_text = "idm";
  std::string cell_text = "C30:S20";
  int eval_seeds = 1;
  std::string ckpt_in;
  bool no_sbr = false;
  bool verbose = false;
  eval_cmd->add_option("--method", method_text, "idm, graph or hrl")->check(CLI::IsMember({"idm", "graph", "hrl"}, CLI::ignore_case));
  eval_cmd->add_option("--cell", cell_text, "Grid cell as C<entry time>:S<entry speed kph>");
  eval_cmd->add_option("--seeds", eval_seeds, "Traffic realisations")->check(CLI::PositiveNumber);
  eval_cmd->add_option("--checkpoint", ckpt_in, "HRL checkpoint");
  eval_cmd->add_flag("--no-sbr", no_sbr, "Disable the SBR safety gate");
  eval_cmd->add_flag("--verbose-log", verbose, "Append reward terms to the trajectory CSV");

  auto* grid_cmd = app.add_subcommand("grid", "Evaluate every method on the full scenario grid");
  std::vector<std::string> grid_methods;
  int grid_seeds = 0;
  bool serial = false;
  grid_cmd->add_option("--methods", grid_methods, "Subset of idm,graph,hrl")->delimiter(',');
  grid_cmd->add_option("--seeds", grid_seeds, "Seeds per cell (overrides the config)");
  grid_cmd->add_option("--checkpoint", ckpt_in, "HRL checkpoint");
  grid_cmd->add_flag("--serial", serial, "Run on one thread");

  auto* plot_cmd = app.add_subcommand("plot-data", "Emit journey series and heat maps for plotting");
  std::vector<std::string> plot_cells{"C30:S20", "C40:S20", "C50:S20"};
  std::string metrics_in;
  plot_cmd->add_option("--cells", plot_cells, "Cells to trace")->delimiter(',');
  plot_cmd->add_option("--metrics", metrics_in, "Grid metrics CSV to turn into heat maps")->check(CLI::ExistingFile);
  plot_cmd->add_option("--checkpoint", ckpt_in, "HRL checkpoint");

  CLI11_PARSE(app, argc, argv);

  try {
    AppConfig config = config_path.empty() ? AppConfig{} : load_config(config_path);
    if (seed) {
      config.grid.base_seed = *seed;
      config.train.seed = *seed;
    }
    const fs::path dir(out_dir);
    fs::create_directories(dir);

    if (*train_cmd) {
      if (steps >= 0) config.train.total_steps = steps;
      if (config.train.warmup > config.train.total_steps) config.train.warmup = config.train.total_steps;
      const std::string ckpt = ckpt_out.empty() ? (dir / "hrl.ckpt").string() : ckpt_out;
      const std::uint64_t hash = rl::config_hash(config.train.network, rl::StackSpec{}, rl::FeatureScale{});
      rl::TrainHooks hooks;
      hooks.abort_checkpoint = ckpt + ".abort";
      hooks.checkpoint_hash = hash;
      std::mt19937_64 eval_rng(config.train.seed ^ 0xe7a1ULL);
      const auto sampler = rl::random_entry_sampler(config.scenario);
      for (int i = 0; i < config.train.eval_episodes; ++i) hooks.eval_scenarios.push_back(sampler(eval_rng));
      auto eval_out = open_out(dir / "training_eval.csv");
      eval_out << "steps,mean_return,mean_energy,mean_travel_time,collisions\n";
      hooks.on_eval = [&](const rl::EvalRow& r) {
        eval_out << r.steps << ',' << csv::num(r.mean_return) << ',' << csv::num(r.mean_energy) << ','
                 << csv::num(r.mean_travel_time) << ',' << r.collisions << '\n';
        std::printf("step %ld  eval return %.3f  energy %.0f J  time %.1f s  collisions %d\n", r.steps,
                    r.mean_return, r.mean_energy, r.mean_travel_time, r.collisions);
        std::fflush(stdout);
      };
      hooks.on_episode = [](const rl::CurveRow& r) {
        if (r.episode % 50 == 0) {
          std::printf("episode %ld  steps %ld  avg speed %.2f  energy %.0f J  return %.2f\n", r.episode, r.steps,
                      r.avg_speed, r.energy_J, r.ret);
          std::fflush(stdout);
        }
      };
      const rl::TrainResult result = rl::train(env_config(config), sampler, config.train, hooks);
      auto curve = open_out(dir / "training_curve.csv");
      rl::write_curve_csv(curve, result.curve);
      rl::save_checkpoint(ckpt, result.network, hash);
      std::printf("trained %ld steps over %zu episodes; checkpoint %s\n", result.steps, result.curve.size(),
                  ckpt.c_str());
      return 0;
    }

    if (*eval_cmd) {
      const Method method = parse_method(method_text);
      const Cell cell = parse_cell(cell_text);
      std::optional<rl::Network> net;
      if (method == Method::HRL) net = hrl_network(config, ckpt_in);
      std::vector<MetricsRow> rows;
      RunOptions opts{!no_sbr, verbose};
      for (int k = 0; k < eval_seeds; ++k) {
        const EpisodeResult r = run_episode(method, cell.C, cell.S, k, config, net ? &*net : nullptr, opts);
        rows.push_back(r.row);
        if (k == 0) {
          const std::string stem = std::string(to_string(method)) + "_" + cell_text.replace(cell_text.find(':'), 1, "_");
          auto traj = open_out(dir / ("trajectory_" + stem + ".csv"));
          write_csv(traj, r.log);
          if (r.plan) {
            auto plan = open_out(dir / ("plan_" + stem + ".csv"));
            gbtpa::write_plan_csv(plan, *r.plan);
          }
        }
        std::printf("%s C%g S%g seed %d: %s  travel %.2f s  energy %.1f J  lane changes %d\n",
                    std::string(to_string(method)).c_str(), cell.C, cell.S, k,
                    std::string(to_string(r.row.status)).c_str(), r.row.travel_time, r.row.energy,
                    r.row.lane_changes);
      }
      auto out = open_out(dir / "eval_metrics.csv");
      write_metrics_csv(out, rows);
      return count_collisions(rows) == 0 ? 0 : 1;
    }

    if (*grid_cmd) {
      GridSpec spec = config.grid;
      if (!grid_methods.empty()) {
        spec.methods.clear();
        for (const auto& m : grid_methods) spec.methods.push_back(parse_method(m));
      }
      if (grid_seeds > 0) spec.seeds = grid_seeds;
      std::optional<rl::Network> net;
      if (uses_hrl(spec.methods)) net = hrl_network(config, ckpt_in);
      const auto rows = serial ? grid_eval_serial(config, spec, net ? &*net : nullptr)
                               : grid_eval(config, spec, net ? &*net : nullptr);
      auto out = open_out(dir / "grid_metrics.csv");
      write_metrics_csv(out, rows);
      write_reports(dir, rows, spec);
      const int collisions = count_collisions(rows);
      std::printf("%zu episodes, %d collisions\n", rows.size(), collisions);
      return collisions == 0 ? 0 : 1;
    }

    if (*plot_cmd) {
      std::optional<rl::Network> net = hrl_network(config, ckpt_in);
      for (const auto& text : plot_cells) {
        const Cell cell = parse_cell(text);
        for (Method m : config.grid.methods) {
          const EpisodeResult r = run_episode(m, cell.C, cell.S, 0, config, &*net);
          char name[96];
          std::snprintf(name, sizeof name, "series_%s_C%g_S%g.csv", std::string(to_string(m)).c_str(), cell.C, cell.S);
          auto out = open_out(dir / name);
          write_series_csv(out, journey_series(r.log, config.scenario.geometry.end()));
        }
      }
      if (!metrics_in.empty()) {
        std::ifstream in(metrics_in);
        const auto rows = read_metrics_csv(in);
        write_reports(dir, rows, config.grid);
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
