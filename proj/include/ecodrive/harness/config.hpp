#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ecodrive/energy.hpp"
#include "ecodrive/gbtpa.hpp"
#include "ecodrive/reward.hpp"
#include "ecodrive/rl/agent.hpp"
#include "ecodrive/rl/env.hpp"
#include "ecodrive/rules.hpp"
#include "ecodrive/world/world.hpp"

namespace ecodrive::harness {

enum class Method { IDM, Graph, HRL };

std::string_view to_string(Method method);
Method parse_method(std::string_view text);

struct GridSpec {
  std::vector<double> entry_times{0, 10, 20, 30, 40, 50};
  std::vector<double> entry_speeds{10, 20, 30, 40, 50};  ///< kph
  std::vector<Method> methods{Method::IDM, Method::Graph, Method::HRL};
  int seeds = 5;
  std::uint64_t base_seed = 2024;
};

struct AppConfig {
  ScenarioConfig scenario;
  EnergyParams energy;
  RewardWeights weights;
  RuleConfig rules;
  bool regen = false;

  rl::TrainConfig train;
  int decision_interval = 4;
  std::string checkpoint;  ///< HRL network used by eval and grid

  gbtpa::GridResolution graph;
  gbtpa::FollowConfig follow;

  GridSpec grid;
};

/// Defaults overlaid with the YAML file; unknown keys are rejected.
AppConfig load_config(const std::string& path);
AppConfig parse_config(const std::string& yaml_text);

rl::EnvConfig env_config(const AppConfig& config);

/// Traffic seed of one grid cell, independent of the method.
std::uint64_t cell_seed(std::uint64_t base, double entry_time, double entry_speed_kph, int seed_index);

}  // namespace ecodrive::harness
