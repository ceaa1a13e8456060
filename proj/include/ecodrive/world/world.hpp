#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <vector>

#include "ecodrive/world/idm.hpp"
#include "ecodrive/world/signal.hpp"
#include "ecodrive/world/vehicle.hpp"

namespace ecodrive {

struct RoadGeometry {
  double stop_line = 510.0;   ///< upstream length; the stop line sits here [m]
  double downstream = 40.0;   ///< length past the stop line [m]
  int lanes = 5;
  double lane_width = 3.5;
  double vehicle_length = 4.5;
  double vehicle_width = 1.8;
  double v_lat = 1.75;          ///< lateral speed during a lane change [m/s]
  double sensor_range = 100.0;  ///< radar range [m]
  double side_warning = 2.0;    ///< W_l = W_r [m]

  double end() const { return stop_line + downstream; }
};

inline constexpr double kph(double value) { return value / 3.6; }

/// A stalled vehicle placed in the ego's path when the ego enters.
struct Blocker {
  int lane = 0;
  double x_lon = 0.0;  ///< front bumper [m]
};

struct ScenarioConfig {
  double entry_time_offset = 0.0;  ///< signal-cycle time at which the ego enters [s]
  double entry_speed = kph(30.0);  ///< [m/s]
  double flow_rate = 0.1;          ///< background arrivals per lane [veh/s]
  std::uint64_t seed = 1;
  double speed_limit = kph(50.0);
  double dt = 0.02;
  RoadGeometry geometry;
  SignalTiming signal;
  double warmup = 60.0;   ///< background traffic runs this long before the ego enters [s]
  double timeout = 300.0; ///< ego journey time limit [s]
  int ego_lane = 2;
  double lateral_decision_period = 1.0;
  std::vector<Blocker> blockers;
};

/// Throws std::invalid_argument on an inconsistent configuration.
void validate(const ScenarioConfig& config);

/// The 12-element logical observation vector plus nothing else.
struct Observation {
  double t_g = 0.0;
  double t_y = 0.0;
  double t_r = 0.0;
  double w_f = 0.0;
  double w_l = 0.0;
  double w_r = 0.0;
  double w_c = 0.0;
  double d_r = 0.0;
  double d_f = 0.0;
  double v_f = 0.0;
  double v = 0.0;
  double a = 0.0;

  static constexpr std::size_t kSize = 12;
  std::array<double, kSize> to_array() const;

  bool green() const { return t_g > 0.0; }
  /// Remaining time of whichever phase is active.
  double phase_remaining() const { return t_g + t_y + t_r; }
};

/// Forward-warning threshold distance W_d, using the ego's maximum deceleration
/// as the denominator acceleration.
double forward_warning_distance(double v, double v_f, double ego_decel);

struct EgoCommand {
  double a_lon = 0.0;
  int lane_target = 0;
};

inline constexpr double kEgoEmergencyDecel = 5.0;

struct WorldState {
  ScenarioConfig config;
  std::int64_t steps = 0;

  bool has_ego = false;
  VehicleState ego;
  VehicleParams ego_params;
  std::vector<VehicleState> others;

  Phase phase = Phase::Green;
  double remaining = 0.0;
  bool collision = false;

  // Traffic generation.
  std::mt19937_64 rng;
  std::vector<double> next_arrival;
  std::vector<std::deque<VehicleType>> pending;
  int next_id = 1;
  int ego_lane_changes = 0;
  bool ego_started_lane_change = false;  ///< set by the last step

  double clock() const { return static_cast<double>(steps) * config.dt; }
};

/// Empty road at clock 0; no ego yet.
WorldState make_world(const ScenarioConfig& config);

/// Puts the ego at x=0 in the given lane. Background vehicles overlapping the
/// entry zone of that lane are removed.
void insert_ego(WorldState& world, int lane, double v);

/// Adds a stalled vehicle; it keeps its place for the rest of the run.
void place_blocker(WorldState& world, const Blocker& blocker);

/// Poisson arrivals at x=0; an arrival waits while the lane entrance is occupied.
void spawn_traffic(WorldState& world);

/// One fixed timestep for every vehicle. Throws on a non-finite command.
void advance(WorldState& world, const EgoCommand& command);

/// Value-semantics wrapper around advance().
WorldState step(const WorldState& world, const EgoCommand& command);

Observation observe(const WorldState& world);

/// Nearest vehicle ahead of `x` among those occupying `lane`; `self_id` is skipped.
std::optional<Leader> leader_in_lane(const WorldState& world, int lane, double x, int self_id);

/// Front gap in the lane beside the ego (sensor range when clear or off-road
/// lanes report 0).
double adjacent_front_gap(const WorldState& world, int direction);

/// Lateral clearance seen by the side radar on one side; sensor range when
/// nothing is inside the side zone.
double side_clearance(const WorldState& world, int direction);

bool vehicles_collide(const VehicleState& a, const VehicleState& b, const RoadGeometry& geometry);

}  // namespace ecodrive
