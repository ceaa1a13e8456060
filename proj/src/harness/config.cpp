#include "ecodrive/harness/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <functional>
#include <map>
#include <stdexcept>

namespace ecodrive::harness {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::IDM: return "IDM";
    case Method::Graph: return "Graph";
    case Method::HRL: return "HRL";
  }
  return "?";
}

Method parse_method(std::string_view text) {
  std::string lower(text);
  for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "idm") return Method::IDM;
  if (lower == "graph" || lower == "gbtpa") return Method::Graph;
  if (lower == "hrl") return Method::HRL;
  throw std::invalid_argument("unknown method '" + std::string(text) + "'");
}

namespace {

using Binder = std::function<void(const YAML::Node&)>;

template <typename T>
Binder bind(T& field) {
  return [&field](const YAML::Node& n) { field = n.as<T>(); };
}

Binder bind_kph(double& field) {
  return [&field](const YAML::Node& n) { field = kph(n.as<double>()); };
}

void apply(const YAML::Node& section, const std::string& name, const std::map<std::string, Binder>& keys) {
  if (!section) return;
  if (!section.IsMap()) throw std::runtime_error("config: section '" + name + "' must be a map");
  for (const auto& kv : section) {
    const auto key = kv.first.as<std::string>();
    auto it = keys.find(key);
    if (it == keys.end()) throw std::runtime_error("config: unknown key '" + name + "." + key + "'");
    try {
      it->second(kv.second);
    } catch (const YAML::Exception& e) {
      throw std::runtime_error("config: bad value for '" + name + "." + key + "': " + e.what());
    }
  }
}

}  // namespace

AppConfig parse_config(const std::string& yaml_text) {
  const YAML::Node root = YAML::Load(yaml_text);
  AppConfig c;
  if (!root || root.IsNull()) return c;
  if (!root.IsMap()) throw std::runtime_error("config: top level must be a map");

  static const std::vector<std::string> sections{"scenario", "signal", "energy", "reward", "rules",
                                                 "train",    "replay", "hrl",    "gbtpa",  "grid"};
  for (const auto& kv : root) {
    const auto name = kv.first.as<std::string>();
    if (std::find(sections.begin(), sections.end(), name) == sections.end())
      throw std::runtime_error("config: unknown section '" + name + "'");
  }

  auto& s = c.scenario;
  apply(root["scenario"], "scenario",
        {{"flow_rate", bind(s.flow_rate)},
         {"speed_limit_kph", bind_kph(s.speed_limit)},
         {"dt", bind(s.dt)},
         {"warmup", bind(s.warmup)},
         {"timeout", bind(s.timeout)},
         {"ego_lane", bind(s.ego_lane)},
         {"lanes", bind(s.geometry.lanes)},
         {"stop_line", bind(s.geometry.stop_line)},
         {"downstream", bind(s.geometry.downstream)},
         {"sensor_range", bind(s.geometry.sensor_range)},
         {"lateral_decision_period", bind(s.lateral_decision_period)}});
  apply(root["signal"], "signal",
        {{"green", bind(s.signal.green)},
         {"yellow", bind(s.signal.yellow)},
         {"red", bind(s.signal.red)},
         {"all_red", bind(s.signal.all_red)}});
  auto& e = c.energy;
  apply(root["energy"], "energy",
        {{"mass", bind(e.mass)},
         {"rolling", bind(e.rolling)},
         {"air_density", bind(e.air_density)},
         {"drag_area", bind(e.drag_area)},
         {"efficiency", bind(e.efficiency)},
         {"aux_power", bind(e.aux_power)},
         {"regen_efficiency", bind(e.regen_efficiency)},
         {"regen", bind(c.regen)}});
  auto& w = c.weights;
  apply(root["reward"], "reward",
        {{"velocity", bind(w.velocity)},
         {"energy", bind(w.energy)},
         {"time", bind(w.time)},
         {"lane_change", bind(w.lane_change)},
         {"danger", bind(w.danger)},
         {"green_pass", bind(w.green_pass)}});
  auto& r = c.rules;
  apply(root["rules"], "rules",
        {{"a_eb", bind(r.a_eb)},
         {"eb_trigger", bind(r.eb_trigger)},
         {"sir_trigger", bind(r.sir_trigger)},
         {"stop_standoff", bind(r.stop_standoff)},
         {"lead_decel", bind(r.lead_decel)},
         {"stop_margin", bind(r.stop_margin)},
         {"baseline_gap", bind(r.baseline_gap)},
         {"baseline_dwell", bind(r.baseline_dwell)}});
  auto& t = c.train;
  apply(root["train"], "train",
        {{"learning_rate", bind(t.learning_rate)},
         {"gamma", bind(t.gamma)},
         {"batch", bind(t.batch)},
         {"warmup", bind(t.warmup)},
         {"target_sync", bind(t.target_sync)},
         {"total_steps", bind(t.total_steps)},
         {"epsilon_start", bind(t.epsilon_start)},
         {"epsilon_end", bind(t.epsilon_end)},
         {"beta_start", bind(t.beta_start)},
         {"beta_end", bind(t.beta_end)},
         {"huber", bind(t.huber)},
         {"train_every", bind(t.train_every)},
         {"eval_every", bind(t.eval_every)},
         {"eval_episodes", bind(t.eval_episodes)},
         {"seed", bind(t.seed)},
         {"shared_layers", bind(t.network.shared)},
         {"stream_layers", bind(t.network.stream)}});
  apply(root["replay"], "replay",
        {{"capacity", bind(t.replay.capacity)}, {"alpha", bind(t.replay.alpha)}, {"epsilon", bind(t.replay.epsilon)}});
  apply(root["hrl"], "hrl", {{"decision_interval", bind(c.decision_interval)}, {"checkpoint", bind(c.checkpoint)}});
  apply(root["gbtpa"], "gbtpa",
        {{"dt", bind(c.graph.dt)},
         {"dv_kph", bind_kph(c.graph.dv)},
         {"horizon", bind(c.graph.horizon)},
         {"kp", bind(c.follow.kp)}});
  std::vector<std::string> methods;
  apply(root["grid"], "grid",
        {{"entry_times", bind(c.grid.entry_times)},
         {"entry_speeds_kph", bind(c.grid.entry_speeds)},
         {"seeds", bind(c.grid.seeds)},
         {"base_seed", bind(c.grid.base_seed)},
         {"methods", bind(methods)}});
  if (!methods.empty()) {
    c.grid.methods.clear();
    for (const auto& m : methods) c.grid.methods.push_back(parse_method(m));
  }

  validate(c.scenario);
  if (!is_valid(c.energy)) throw std::runtime_error("config: invalid energy parameters");
  if (!is_valid(c.weights)) throw std::runtime_error("config: reward weights must be non-negative");
  if (!is_valid(c.rules)) throw std::runtime_error("config: invalid rule parameters");
  rl::validate(c.train);
  if (c.decision_interval < 1) throw std::runtime_error("config: hrl.decision_interval must be positive");
  if (c.grid.seeds < 1) throw std::runtime_error("config: grid.seeds must be positive");
  return c;
}

AppConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::stringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

rl::EnvConfig env_config(const AppConfig& c) {
  rl::EnvConfig env;
  env.episode.energy = c.energy;
  env.episode.weights = c.weights;
  env.episode.regen = c.regen;
  env.rules = c.rules;
  env.rules.dt = c.scenario.dt;
  env.rules.sensor_range = c.scenario.geometry.sensor_range;
  env.decision_interval = c.decision_interval;
  return env;
}

std::uint64_t cell_seed(std::uint64_t base, double entry_time, double entry_speed_kph, int seed_index) {
  auto mix = [](std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  };
  std::uint64_t h = mix(base);
  h = mix(h ^ static_cast<std::uint64_t>(std::llround(entry_time * 1000.0)));
  h = mix(h ^ static_cast<std::uint64_t>(std::llround(entry_speed_kph * 1000.0)));
  h = mix(h ^ static_cast<std::uint64_t>(seed_index));
  return h;
}

}  // namespace ecodrive::harness
