#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string_view>

namespace ecodrive {

enum class VehicleType { A, B, C, D, F, Ego };

std::string_view to_string(VehicleType type);

/// Longitudinal and lateral behaviour parameters of one driver/vehicle class.
struct VehicleParams {
  double a_max = 0.0;    ///< maximum acceleration [m/s^2]
  double b_max = 0.0;    ///< maximum deceleration, positive magnitude [m/s^2]
  double s0 = 0.0;       ///< minimum standstill gap [m]
  double headway = 0.0;  ///< safe time headway T [s]
  double v_tar = 0.0;    ///< desired speed [m/s]
  double r_lat = 0.0;    ///< lane-change propensity per lateral decision
};

bool is_valid(const VehicleParams& params);

inline constexpr std::array<VehicleType, 5> kBackgroundTypes = {
    VehicleType::A, VehicleType::B, VehicleType::C, VehicleType::D, VehicleType::F};

/// Conventional-vehicle classes of the mixed traffic stream.
const VehicleParams& background_params(VehicleType type);

/// The electric CAV: +/-3 m/s^2 limits, cruising at the speed limit.
VehicleParams ego_params(double speed_limit);

struct LaneChange {
  int direction = 0;      ///< -1 left, +1 right
  double progress = 0.0;  ///< fraction of the lateral move completed, in [0, 1]
};

struct VehicleState {
  int id = 0;
  VehicleType type = VehicleType::A;
  double x_lon = 0.0;  ///< front bumper position along the approach [m]
  double x_lat = 0.0;  ///< lateral centre position [m], lane * lane_width when settled
  int lane = 0;        ///< source lane while a manoeuvre is in progress
  double v = 0.0;
  double accel = 0.0;
  std::optional<LaneChange> lane_change;
  bool stalled = false;  ///< scripted obstacle that never moves

  // Background-vehicle bookkeeping.
  double next_lateral_decision = 0.0;
  std::minstd_rand rng{1};

  bool occupies(int lane_index) const {
    return lane == lane_index || (lane_change && lane + lane_change->direction == lane_index);
  }
};

}  // namespace ecodrive
