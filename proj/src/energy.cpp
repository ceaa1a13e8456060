#include "ecodrive/energy.hpp"

#include <algorithm>
#include <cmath>

#include "ecodrive/trajectory.hpp"

namespace ecodrive {

bool is_valid(const EnergyParams& p) {
  return p.mass >= 0.0 && p.rolling >= 0.0 && p.air_density >= 0.0 && p.drag_area >= 0.0 &&
         p.efficiency > 0.0 && p.efficiency <= 1.0 && p.gravity >= 0.0 && p.aux_power >= 0.0 &&
         p.regen_efficiency >= 0.0 && p.regen_efficiency <= 1.0;
}

double tractive_power(double v, double a, const EnergyParams& p) {
  const double force = p.mass * a + p.mass * p.gravity * (p.rolling * std::cos(p.grade) + std::sin(p.grade)) +
                       0.5 * p.air_density * p.drag_area * v * v;
  return force * v;
}

double step_energy(double v, double a, const EnergyParams& p, double dt, bool regen) {
  const double aux = p.aux_power * dt;
  if (a < 0.0) {
    if (!regen) return 0.0;
    const double power = tractive_power(v, a, p);
    if (power < 0.0) return -p.regen_efficiency * std::abs(power) * dt;
    return power * dt / p.efficiency + aux;
  }
  return std::max(0.0, tractive_power(v, a, p)) * dt / p.efficiency + aux;
}

double journey_energy(const TrajectoryLog& log) {
  double total = 0.0;
  for (const auto& r : log.records) total += r.energy_step_J;
  return total;
}

}  // namespace ecodrive
