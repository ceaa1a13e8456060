#pragma once

namespace ecodrive {

struct TrajectoryLog;

/// Longitudinal-dynamics power surrogate for the electric ego vehicle.
struct EnergyParams {
  double mass = 1500.0;         ///< [kg]
  double rolling = 0.01;        ///< rolling-resistance coefficient C_r
  double air_density = 1.2;     ///< [kg/m^3]
  double drag_area = 0.8;       ///< C_d * A [m^2]
  double efficiency = 0.85;     ///< drivetrain efficiency, (0, 1]
  double gravity = 9.81;        ///< [m/s^2]
  double grade = 0.0;           ///< road grade [rad]
  double aux_power = 0.0;       ///< auxiliary load [W]
  double regen_efficiency = 0.6;
};

bool is_valid(const EnergyParams& params);

/// Wheel power (m a + m g (C_r cos + sin) + 1/2 rho C_dA v^2) v  [W].
double tractive_power(double v, double a, const EnergyParams& params);

/// Energy drawn over one step of length dt [J]. Without regen, braking steps
/// (a < 0) cost nothing; with regen, negative wheel power is recovered at
/// regen_efficiency and returned as a negative value.
double step_energy(double v, double a, const EnergyParams& params, double dt, bool regen = false);

/// Sum of the per-step energies of a log; 0 for an empty log.
double journey_energy(const TrajectoryLog& log);

}  // namespace ecodrive
