#pragma once

#include <optional>

#include "ecodrive/rules.hpp"

namespace ecodrive::rl {

inline constexpr int kActionCount = 13;
inline constexpr double kActionAccel = 3.0;

using ActionId = int;

/// ids 0-4: +0.2a..+1.0a, ids 5-9: -0.2a..-1.0a, 10: left, 11: hold, 12: right.
ManagedAction decode(ActionId id);

/// Inverse of decode; nullopt when the pair is not one of the 13 actions.
std::optional<ActionId> encode(double a_lon, int lane_target);

}  // namespace ecodrive::rl
