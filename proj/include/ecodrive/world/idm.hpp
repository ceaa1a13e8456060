#pragma once

#include <optional>

#include "ecodrive/world/signal.hpp"
#include "ecodrive/world/vehicle.hpp"

namespace ecodrive {

struct Leader {
  double gap = 0.0;     ///< bumper-to-bumper distance [m]
  double v_lead = 0.0;  ///< leader speed [m/s]
};

/// Free-road acceleration when there is no leader, interaction form otherwise.
/// The desired gap never drops below s0. Result is clamped to [-b_max, a_max];
/// a vanishing or negative gap yields -b_max.
double idm_acceleration(double v, const std::optional<Leader>& leader, const VehicleParams& params);

/// Desired dynamic gap s* of the interaction term.
double idm_desired_gap(double v, double v_lead, const VehicleParams& params);

enum class LateralMove { Left = -1, Stay = 0, Right = 1 };

/// Random lane-change draw. Left iff r <= R/2, Right iff r > 1 - R/2.
/// A move that would leave the carriageway is forced to Stay.
LateralMove lateral_decision(int lane, int lane_count, double r, const VehicleParams& params);

/// The stop line as a standing obstacle while the signal requires a stop and
/// the vehicle can still halt within b_max; nullopt otherwise.
std::optional<Leader> stop_line_leader(double distance_to_line, double v, Phase phase,
                                       const VehicleParams& params);

/// Tighter of two optional leaders (the one giving the lower IDM acceleration
/// is not always the closer one, so both are evaluated).
double idm_with_leaders(double v, const std::optional<Leader>& vehicle,
                        const std::optional<Leader>& stop_line, const VehicleParams& params);

}  // namespace ecodrive
