#include "ecodrive/rl/action.hpp"

#include <cmath>
#include <stdexcept>

namespace ecodrive::rl {
namespace {

double level_accel(int level) { return 0.2 * level * kActionAccel; }

}  // namespace

ManagedAction decode(ActionId id) {
  if (id < 0 || id >= kActionCount) throw std::out_of_range("action id outside 0..12");
  if (id < 5) return {level_accel(id + 1), 0, ActionSource::RL};
  if (id < 10) return {-level_accel(id - 4), 0, ActionSource::RL};
  return {0.0, id - 11, ActionSource::RL};
}

std::optional<ActionId> encode(double a_lon, int lane_target) {
  if (lane_target != 0) {
    if (a_lon != 0.0 || lane_target < -1 || lane_target > 1) return std::nullopt;
    return 11 + lane_target;
  }
  if (a_lon == 0.0) return 11;
  for (int level = 1; level <= 5; ++level) {
    const double magnitude = level_accel(level);
    if (std::abs(std::abs(a_lon) - magnitude) < 1e-12) return a_lon > 0.0 ? level - 1 : level + 4;
  }
  return std::nullopt;
}

}  // namespace ecodrive::rl
