#include "ecodrive/gbtpa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <tuple>

#include "ecodrive/csv.hpp"

namespace ecodrive::gbtpa {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Terminal {
  bool found = false;
  int window = 0;
  double cost = kInf;
  double cross = 0.0;
  int k = 0;
  int i = 0;
  int j = 0;

  auto key() const { return std::tie(window, cost, cross, k, i, j); }
};

struct Tables {
  int cols = 0;
  std::vector<double> cost;        // layers x cols x speeds
  std::vector<std::int8_t> pred;   // predecessor speed index, -1 for none

  std::size_t at(const StateGraph& g, int k, int i, int j) const {
    return (static_cast<std::size_t>(k) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(i)) *
               static_cast<std::size_t>(g.speeds) +
           static_cast<std::size_t>(j);
  }
};

Tables init_tables(const StateGraph& g, int j0) {
  Tables t;
  t.cols = g.stop_column;
  const std::size_t n = static_cast<std::size_t>(g.layers) * t.cols * g.speeds;
  t.cost.assign(n, kInf);
  t.pred.assign(n, -1);
  t.cost[t.at(g, 0, 0, j0)] = 0.0;
  return t;
}

int window_of(double t, const SignalTiming& signal) {
  return static_cast<int>(std::floor((t + signal.phase_offset) / signal.cycle()));
}

// Crossing edges out of layer k, all of which must end at the exit speed.
void scan_terminals(const StateGraph& g, const Tables& t, int k, Terminal& best) {
  const int jn = g.exit_speed;
  const double x_line = g.problem.stop_line;
  for (int i = 0; i < t.cols; ++i) {
    for (int j = std::max(0, jn - g.max_dj); j <= std::min(g.speeds - 1, jn + g.max_dj); ++j) {
      const double c0 = t.cost[t.at(g, k, i, j)];
      if (c0 == kInf || !g.feasible_edge(j, jn) || i + j + jn < g.stop_column) continue;
      const double cross = g.time(k) + crossing_offset(g.speed(j), g.speed(jn), g.grid.dt, x_line - g.position(i));
      const double abs_cross = g.problem.t0 + cross;
      if (!green_interior(abs_cross, g.problem.signal, g.grid.dt)) continue;
      Terminal cand{true, window_of(abs_cross, g.problem.signal), c0 + g.energy(j, jn), cross, k, i, j};
      if (!best.found || cand.key() < best.key()) best = cand;
    }
  }
}

PlannedTrajectory reconstruct(const StateGraph& g, const Tables& t, const Terminal& term) {
  PlannedTrajectory out;
  if (!term.found) {
    out.reason = "no green crossing at the exit speed within the horizon";
    return out;
  }
  out.feasible = true;
  out.energy = term.cost;
  out.crossing_time = term.cross;
  out.crossing_window = term.window;
  const int i_end = term.i + term.j + g.exit_speed;
  out.waypoints.push_back({g.time(term.k + 1), g.position(i_end), g.speed(g.exit_speed)});
  int i = term.i;
  int j = term.j;
  for (int k = term.k; k >= 0; --k) {
    out.waypoints.push_back({g.time(k), g.position(i), g.speed(j)});
    if (k == 0) break;
    const int jp = t.pred[t.at(g, k, i, j)];
    i -= jp + j;
    j = jp;
  }
  std::reverse(out.waypoints.begin(), out.waypoints.end());
  return out;
}

}  // namespace

bool StateGraph::feasible_edge(int j, int jn) const {
  if (j < 0 || jn < 0 || j >= speeds || jn >= speeds) return false;
  return !std::isnan(energy(j, jn));
}

std::size_t StateGraph::pruned_nodes() const {
  std::size_t closed = 0;
  for (auto open : line_open) closed += open ? 0 : 1;
  return closed * static_cast<std::size_t>(speeds);
}

std::size_t StateGraph::node_count() const {
  return static_cast<std::size_t>(layers) * static_cast<std::size_t>(stop_column + 1) *
             static_cast<std::size_t>(speeds) -
         pruned_nodes();
}

bool green_interior(double t, const SignalTiming& signal, double margin) {
  const SignalState s = signal_at(t, signal);
  return s.phase == Phase::Green && s.elapsed >= margin && s.remaining >= margin;
}

double crossing_offset(double v, double vn, double dt, double distance) {
  if (distance <= 0.0) return 0.0;
  const double a = (vn - v) / dt;
  // Stable root of v*tau + a*tau^2/2 = distance.
  return 2.0 * distance / (v + std::sqrt(std::max(0.0, v * v + 2.0 * a * distance)));
}

StateGraph build_graph(const PlanProblem& problem, const GridResolution& grid) {
  if (!(grid.dt > 0.0) || !(grid.dv > 0.0) || !(grid.horizon > 0.0) || !(grid.energy_dt > 0.0))
    throw std::invalid_argument("gbtpa: grid resolutions must be positive");
  if (!(problem.stop_line > 0.0) || !(problem.v_max > 0.0) || problem.v_exit < 0.0 || problem.v_exit > problem.v_max)
    throw std::invalid_argument("gbtpa: bad plan problem");
  const SignalTiming& sig = problem.signal;
  const bool signalized = sig.yellow + sig.red + sig.all_red > 0.0;
  if (signalized && grid.horizon < 2.0 * sig.cycle())
    throw std::invalid_argument("gbtpa: horizon must cover at least two signal cycles");

  StateGraph g;
  g.problem = problem;
  g.grid = grid;
  g.dx = grid.dv * grid.dt / 2.0;
  g.layers = static_cast<int>(std::floor(grid.horizon / grid.dt + 1e-9)) + 1;
  g.speeds = static_cast<int>(std::floor(problem.v_max / grid.dv + 1e-9)) + 1;
  g.stop_column = static_cast<int>(std::ceil(problem.stop_line / g.dx - 1e-9));
  g.exit_speed = static_cast<int>(std::lround(problem.v_exit / grid.dv));
  if (std::abs(g.exit_speed * grid.dv - problem.v_exit) > 0.5 * grid.dv || g.exit_speed >= g.speeds)
    throw std::invalid_argument("gbtpa: exit speed is off the speed grid");
  const int up = static_cast<int>(std::floor(problem.a_max * grid.dt / grid.dv + 1e-9));
  const int down = static_cast<int>(std::floor(problem.b_max * grid.dt / grid.dv + 1e-9));
  g.max_dj = std::max(up, down);

  const int substeps = std::max(1, static_cast<int>(std::lround(grid.dt / grid.energy_dt)));
  const double h = grid.dt / substeps;
  g.edge_energy.assign(static_cast<std::size_t>(g.speeds * g.speeds), std::numeric_limits<double>::quiet_NaN());
  for (int j = 0; j < g.speeds; ++j) {
    for (int jn = std::max(0, j - down); jn <= std::min(g.speeds - 1, j + up); ++jn) {
      const double v = g.speed(j);
      const double a = (jn - j) * grid.dv / grid.dt;
      double e = 0.0;
      for (int n = 1; n <= substeps; ++n) e += step_energy(v + a * n * h, a, problem.energy, h);
      g.edge_energy[static_cast<std::size_t>(j * g.speeds + jn)] = e;
    }
  }

  g.line_open.resize(static_cast<std::size_t>(g.layers));
  for (int k = 0; k < g.layers; ++k) {
    g.line_open[static_cast<std::size_t>(k)] = green_interior(problem.t0 + g.time(k), sig, grid.dt) ? 1 : 0;
  }
  return g;
}

int snap_speed(const StateGraph& g, double v) {
  const int j = static_cast<int>(std::lround(v / g.grid.dv));
  if (j < 0 || j >= g.speeds || std::abs(j * g.grid.dv - v) > 0.5 * g.grid.dv + 1e-9)
    throw std::invalid_argument("gbtpa: start speed is off the speed grid");
  return j;
}

PlannedTrajectory plan_serial(const StateGraph& g, double v0) {
  Tables t = init_tables(g, snap_speed(g, v0));
  Terminal best;
  for (int k = 0; k + 1 < g.layers; ++k) {
    scan_terminals(g, t, k, best);
    for (int i = 0; i < t.cols; ++i) {
      for (int j = 0; j < g.speeds; ++j) {
        const double c0 = t.cost[t.at(g, k, i, j)];
        if (c0 == kInf) continue;
        for (int jn = std::max(0, j - g.max_dj); jn <= std::min(g.speeds - 1, j + g.max_dj); ++jn) {
          const int in = i + j + jn;
          if (in >= t.cols || !g.feasible_edge(j, jn)) continue;
          const double c = c0 + g.energy(j, jn);
          const std::size_t n = t.at(g, k + 1, in, jn);
          if (c < t.cost[n] || (c == t.cost[n] && j < t.pred[n])) {
            t.cost[n] = c;
            t.pred[n] = static_cast<std::int8_t>(j);
          }
        }
      }
    }
  }
  return reconstruct(g, t, best);
}

PlannedTrajectory plan(const StateGraph& g, double v0) {
  Tables t = init_tables(g, snap_speed(g, v0));
  Terminal best;
  for (int k = 0; k + 1 < g.layers; ++k) {
    scan_terminals(g, t, k, best);
#pragma omp parallel for schedule(static)
    for (int in = 0; in < t.cols; ++in) {
      for (int jn = 0; jn < g.speeds; ++jn) {
        double best_cost = kInf;
        int best_j = -1;
        for (int j = std::max(0, jn - g.max_dj); j <= std::min(g.speeds - 1, jn + g.max_dj); ++j) {
          const int i = in - j - jn;
          if (i < 0 || !g.feasible_edge(j, jn)) continue;
          const double c0 = t.cost[t.at(g, k, i, j)];
          if (c0 == kInf) continue;
          const double c = c0 + g.energy(j, jn);
          if (c < best_cost) {
            best_cost = c;
            best_j = j;
          }
        }
        const std::size_t n = t.at(g, k + 1, in, jn);
        t.cost[n] = best_cost;
        t.pred[n] = static_cast<std::int8_t>(best_j);
      }
    }
  }
  return reconstruct(g, t, best);
}

void write_plan_csv(std::ostream& out, const PlannedTrajectory& p) {
  out << "t,x,v\n";
  for (const auto& w : p.waypoints) out << csv::num(w.t) << ',' << csv::num(w.x) << ',' << csv::num(w.v) << '\n';
}

Reference reference_at(const PlannedTrajectory& p, double t, double v_after) {
  if (!p.feasible || p.waypoints.empty() || t >= p.waypoints.back().t) return {v_after, 0.0};
  if (t <= p.waypoints.front().t) return {p.waypoints.front().v, 0.0};
  auto it = std::upper_bound(p.waypoints.begin(), p.waypoints.end(), t,
                             [](double value, const Waypoint& w) { return value < w.t; });
  const Waypoint& b = *it;
  const Waypoint& a = *(it - 1);
  const double slope = (b.v - a.v) / (b.t - a.t);
  return {a.v + slope * (t - a.t), slope};
}

double governor_limit(double v, const std::optional<Leader>& leader, const std::optional<Leader>& stop_line,
                      const VehicleParams& ego) {
  double limit = kInf;
  for (const auto* l : {&leader, &stop_line}) {
    if (!*l) continue;
    double a = -ego.b_max;
    if ((*l)->gap > 0.0) {
      const double ratio = idm_desired_gap(v, (*l)->v_lead, ego) / (*l)->gap;
      a = std::clamp(ego.a_max * (1.0 - ratio * ratio), -ego.b_max, ego.a_max);
    }
    limit = std::min(limit, a);
  }
  return limit;
}

double follow_command(const Reference& ref, double v, const std::optional<Leader>& leader,
                      const std::optional<Leader>& stop_line, const VehicleParams& ego, const FollowConfig& config) {
  const double tracking = std::clamp(ref.a + config.kp * (ref.v - v), -config.a_limit, config.a_limit);
  return std::min(tracking, governor_limit(v, leader, stop_line, ego));
}

ManagedAction follow(const PlannedTrajectory& p, const WorldState& world, double elapsed, const FollowConfig& config) {
  const auto& g = world.config.geometry;
  const VehicleState& ego = world.ego;
  const Reference ref = reference_at(p, elapsed, world.config.speed_limit);
  std::optional<Leader> leader;
  for (int l = 0; l < g.lanes; ++l) {
    if (!ego.occupies(l)) continue;
    auto cand = leader_in_lane(world, l, ego.x_lon, ego.id);
    if (cand && cand->gap <= g.sensor_range && (!leader || cand->gap < leader->gap)) leader = cand;
  }
  std::optional<Leader> line;
  const double d_r = g.stop_line - ego.x_lon;
  if (d_r <= g.sensor_range) line = stop_line_leader(d_r, ego.v, world.phase, world.ego_params);
  return {follow_command(ref, ego.v, leader, line, world.ego_params, config), 0, ActionSource::IDM};
}

}  // namespace ecodrive::gbtpa
