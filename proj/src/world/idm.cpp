#include "ecodrive/world/idm.hpp"

#include <algorithm>
#include <cmath>

namespace ecodrive {

double idm_desired_gap(double v, double v_lead, const VehicleParams& p) {
  const double dv = v - v_lead;
  const double dynamic = v * p.headway + v * dv / (2.0 * std::sqrt(p.a_max * p.b_max));
  return p.s0 + std::max(0.0, dynamic);
}

double idm_acceleration(double v, const std::optional<Leader>& leader, const VehicleParams& p) {
  double a = 0.0;
  if (!leader) {
    const double ratio = v / p.v_tar;
    a = p.a_max * (1.0 - ratio * ratio);
  } else {
    if (!(leader->gap > 0.0)) return -p.b_max;
    const double ratio = v / p.v_tar;
    const double interaction = idm_desired_gap(v, leader->v_lead, p) / leader->gap;
    a = p.a_max * (1.0 - std::pow(ratio, 4) - interaction * interaction);
  }
  if (!std::isfinite(a)) return -p.b_max;
  return std::clamp(a, -p.b_max, p.a_max);
}

LateralMove lateral_decision(int lane, int lane_count, double r, const VehicleParams& p) {
  LateralMove move = LateralMove::Stay;
  if (r <= p.r_lat / 2.0) {
    move = LateralMove::Left;
  } else if (r > 1.0 - p.r_lat / 2.0) {
    move = LateralMove::Right;
  }
  const int target = lane + static_cast<int>(move);
  if (target < 0 || target >= lane_count) return LateralMove::Stay;
  return move;
}

std::optional<Leader> stop_line_leader(double distance_to_line, double v, Phase phase,
                                       const VehicleParams& p) {
  if (!stop_required(phase) || distance_to_line <= 0.0) return std::nullopt;
  if (v * v / (2.0 * p.b_max) > distance_to_line) return std::nullopt;
  return Leader{distance_to_line, 0.0};
}

double idm_with_leaders(double v, const std::optional<Leader>& vehicle,
                        const std::optional<Leader>& stop_line, const VehicleParams& p) {
  if (!vehicle && !stop_line) return idm_acceleration(v, std::nullopt, p);
  double a = p.a_max;
  if (vehicle) a = std::min(a, idm_acceleration(v, vehicle, p));
  if (stop_line) a = std::min(a, idm_acceleration(v, stop_line, p));
  return a;
}

}  // namespace ecodrive
