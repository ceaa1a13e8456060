#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ecodrive/energy.hpp"
#include "ecodrive/rules.hpp"
#include "ecodrive/world/signal.hpp"
#include "ecodrive/world/vehicle.hpp"
#include "ecodrive/world/world.hpp"

namespace ecodrive::gbtpa {

struct GridResolution {
  double dt = 1.0;          ///< time layer spacing [s]
  double dv = kph(5.0);     ///< speed grid spacing [m/s]
  double horizon = 200.0;   ///< planning horizon [s]
  double energy_dt = 0.02;  ///< sub-step used to integrate edge energies [s]
};

/// Everything the planner needs to know about the approach.
struct PlanProblem {
  double stop_line = 510.0;  ///< distance from the start position to the stop line [m]
  double v_max = kph(50.0);
  double v_exit = kph(50.0);  ///< required speed when crossing the line
  double a_max = 3.0;
  double b_max = 3.0;
  double t0 = 0.0;  ///< world clock at the start node; the signal is evaluated at t0 + t
  SignalTiming signal;
  EnergyParams energy;
};

/// Time-expanded (time, distance, speed) lattice. Distance index i means
/// x = i * dx with dx = dv * dt / 2, so the trapezoidal distance of every
/// speed pair lands exactly on the grid.
struct StateGraph {
  PlanProblem problem;
  GridResolution grid;
  double dx = 0.0;
  int layers = 0;       ///< time indices 0..layers-1
  int speeds = 0;       ///< speed indices 0..speeds-1
  int max_dj = 0;       ///< speed indices reachable in one layer
  int stop_column = 0;  ///< first distance index at or past the stop line
  int exit_speed = 0;   ///< speed index of v_exit
  std::vector<double> edge_energy;       ///< speeds x speeds, row = from, col = to; NaN when infeasible
  std::vector<std::uint8_t> line_open;   ///< per layer: stop-line column usable at that time

  double time(int k) const { return k * grid.dt; }
  double speed(int j) const { return j * grid.dv; }
  double position(int i) const { return i * dx; }
  bool feasible_edge(int j, int jn) const;
  double energy(int j, int jn) const { return edge_energy[static_cast<std::size_t>(j * speeds + jn)]; }

  /// |T| * |X| * |V| over columns 0..stop_column, minus pruned stop-line nodes.
  std::size_t node_count() const;
  std::size_t pruned_nodes() const;
};

/// True when `t` lies inside a green interval with at least `margin` on both sides.
bool green_interior(double t, const SignalTiming& signal, double margin);

/// Exact time to cover `distance` along an edge of constant acceleration.
double crossing_offset(double v, double vn, double dt, double distance);

/// Throws std::invalid_argument on a non-positive resolution or a horizon
/// shorter than two signal cycles.
StateGraph build_graph(const PlanProblem& problem, const GridResolution& grid);

struct Waypoint {
  double t = 0.0;
  double x = 0.0;
  double v = 0.0;
};

struct PlannedTrajectory {
  bool feasible = false;
  std::string reason;
  std::vector<Waypoint> waypoints;  ///< one per layer, ending with the first node past the line
  double crossing_time = 0.0;
  int crossing_window = 0;  ///< signal cycle index of the crossing
  double energy = 0.0;      ///< summed edge energies [J]
};

/// Minimum-energy path from (t=0, x=0, v0) to a crossing at v_exit inside the
/// earliest reachable green window; ties go to the earlier crossing. Uses the
/// OpenMP pull formulation.
PlannedTrajectory plan(const StateGraph& graph, double v0);

/// Serial push formulation of the same recursion, kept as the reference.
PlannedTrajectory plan_serial(const StateGraph& graph, double v0);

/// Speed index closest to v; throws when v is off the grid by more than half a step.
int snap_speed(const StateGraph& graph, double v);

/// Plan CSV with columns t,x,v.
void write_plan_csv(std::ostream& out, const PlannedTrajectory& plan);

struct FollowConfig {
  double kp = 1.0;     ///< speed-error gain [1/s]
  double a_limit = 3.0;
};

/// Reference speed and feed-forward acceleration of the plan at time t;
/// past the last waypoint the reference holds the exit speed.
struct Reference {
  double v = 0.0;
  double a = 0.0;
};
Reference reference_at(const PlannedTrajectory& plan, double t, double v_after);

/// Longitudinal command of the tracker: proportional speed control bounded by
/// +/-a_limit, then capped by the IDM interaction term against the leader and
/// the stop line (the governor).
double follow_command(const Reference& ref, double v, const std::optional<Leader>& leader,
                      const std::optional<Leader>& stop_line, const VehicleParams& ego, const FollowConfig& config);

/// One tracking step against the live world: reference from the plan at the
/// episode's elapsed time, governor against the same-lane leader and the stop
/// line. Lateral control is left to the caller.
ManagedAction follow(const PlannedTrajectory& plan, const WorldState& world, double elapsed,
                     const FollowConfig& config = {});

/// IDM acceleration with the free-road term removed, or +inf without any leader.
double governor_limit(double v, const std::optional<Leader>& leader, const std::optional<Leader>& stop_line,
                      const VehicleParams& ego);

}  // namespace ecodrive::gbtpa
