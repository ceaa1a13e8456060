#include "ecodrive/world/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ecodrive {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Kinematic gap a follower needs to avoid exceeding its braking capability.
double required_gap(double s0, double v_follow, double v_lead, double b) {
  const double closing = std::max(0.0, v_follow - v_lead);
  return s0 + closing * closing / (2.0 * b);
}

// Gap that lets a follower stop behind a leader braking at its own limit.
double stopping_gap(double s0, double v_follow, double b_follow, double v_lead, double b_lead) {
  return s0 + std::max(0.0, v_follow * v_follow / (2.0 * b_follow) - v_lead * v_lead / (2.0 * b_lead));
}

struct LaneRef {
  double x;
  double v;
  int id;
};

// Per-lane occupancy sorted by position, built once per step from the pre-step state.
class LaneIndex {
 public:
  explicit LaneIndex(const WorldState& world) : lanes_(world.config.geometry.lanes) {
    auto add = [&](const VehicleState& s) {
      for (int l = 0; l < static_cast<int>(lanes_.size()); ++l) {
        if (s.occupies(l)) lanes_[l].push_back({s.x_lon, s.v, s.id});
      }
    };
    for (const auto& s : world.others) add(s);
    if (world.has_ego) add(world.ego);
    for (auto& lane : lanes_) {
      std::sort(lane.begin(), lane.end(),
                [](const LaneRef& a, const LaneRef& b) { return a.x < b.x || (a.x == b.x && a.id < b.id); });
    }
  }

  std::optional<LaneRef> leader(int lane, double x, int self_id) const {
    const auto& refs = lanes_[lane];
    auto it = std::lower_bound(refs.begin(), refs.end(), x, [](const LaneRef& r, double value) { return r.x < value; });
    for (; it != refs.end(); ++it) {
      if (it->id != self_id) return *it;
    }
    return std::nullopt;
  }

 private:
  std::vector<std::vector<LaneRef>> lanes_;
};

VehicleState make_background(WorldState& world, VehicleType type, int lane) {
  VehicleState s;
  s.id = world.next_id++;
  s.type = type;
  s.lane = lane;
  s.x_lon = 0.0;
  s.x_lat = lane * world.config.geometry.lane_width;
  s.v = background_params(type).v_tar;
  s.next_lateral_decision = world.clock() + world.config.lateral_decision_period;
  s.rng.seed(static_cast<std::uint_fast32_t>(
      splitmix64(world.config.seed ^ (static_cast<std::uint64_t>(s.id) << 20)) & 0x7fffffffU));
  return s;
}

const VehicleParams& params_of(const WorldState& world, const VehicleState& s) {
  return s.type == VehicleType::Ego ? world.ego_params : background_params(s.type);
}

bool lane_entry_safe(const WorldState& world, const VehicleState& self, int target) {
  const double length = world.config.geometry.vehicle_length;
  const VehicleParams& own = params_of(world, self);
  auto conflicts = [&](const VehicleState& o) {
    if (o.id == self.id || !o.occupies(target)) return false;
    const double dx = o.x_lon - self.x_lon;
    const VehicleParams& theirs = params_of(world, o);
    if (dx >= 0.0) {
      return dx - length < std::max(required_gap(own.s0, self.v, o.v, own.b_max),
                                    stopping_gap(own.s0, self.v, own.b_max, o.v, theirs.b_max));
    }
    return -dx - length < std::max(required_gap(theirs.s0, o.v, self.v, theirs.b_max),
                                   stopping_gap(theirs.s0, o.v, theirs.b_max, self.v, own.b_max));
  };
  if (world.has_ego && conflicts(world.ego)) return false;
  return std::none_of(world.others.begin(), world.others.end(), conflicts);
}

void integrate(VehicleState& s, double a, double dt, double v_cap, const RoadGeometry& g) {
  const double v_next = std::min(std::max(0.0, s.v + a * dt), v_cap);
  s.accel = (v_next - s.v) / dt;
  s.v = v_next;
  s.x_lon += v_next * dt;
  if (s.lane_change) {
    s.lane_change->progress += g.v_lat * dt / g.lane_width;
    if (s.lane_change->progress >= 1.0) {
      s.lane += s.lane_change->direction;
      s.lane_change.reset();
      s.x_lat = s.lane * g.lane_width;
    } else {
      s.x_lat = (s.lane + s.lane_change->direction * s.lane_change->progress) * g.lane_width;
    }
  }
}

void refresh_signal(WorldState& world) {
  const SignalState sig = signal_at(world.clock(), world.config.signal);
  world.phase = sig.phase;
  world.remaining = sig.remaining;
}

}  // namespace

std::array<double, Observation::kSize> Observation::to_array() const {
  return {t_g, t_y, t_r, w_f, w_l, w_r, w_c, d_r, d_f, v_f, v, a};
}

double forward_warning_distance(double v, double v_f, double ego_decel) {
  const double dv = v - v_f;
  return (3.0 + dv * dv) / (2.0 * ego_decel);
}

void validate(const ScenarioConfig& c) {
  const auto& g = c.geometry;
  if (!(c.dt > 0.0)) throw std::invalid_argument("scenario: dt must be positive");
  if (g.lanes < 1 || c.ego_lane < 0 || c.ego_lane >= g.lanes) throw std::invalid_argument("scenario: bad lane layout");
  if (!(g.stop_line > 0.0) || g.downstream < 0.0 || !(g.lane_width > 0.0) || !(g.v_lat > 0.0))
    throw std::invalid_argument("scenario: bad geometry");
  if (!(c.speed_limit > 0.0)) throw std::invalid_argument("scenario: speed limit must be positive");
  if (c.entry_speed < 0.0 || c.entry_speed > c.speed_limit + 1e-9)
    throw std::invalid_argument("scenario: entry speed must lie in [0, speed limit]");
  if (c.flow_rate < 0.0) throw std::invalid_argument("scenario: negative flow rate");
  if (!is_valid(c.signal)) throw std::invalid_argument("scenario: bad signal timing");
  if (!(c.timeout > 0.0) || c.warmup < 0.0 || !(c.lateral_decision_period > 0.0))
    throw std::invalid_argument("scenario: bad timing parameters");
}

WorldState make_world(const ScenarioConfig& config) {
  validate(config);
  WorldState world;
  world.config = config;
  world.rng.seed(config.seed);
  world.ego_params = ego_params(config.speed_limit);
  const int lanes = config.geometry.lanes;
  world.next_arrival.assign(lanes, kInf);
  world.pending.assign(lanes, {});
  if (config.flow_rate > 0.0) {
    std::exponential_distribution<double> gap(config.flow_rate);
    for (int l = 0; l < lanes; ++l) world.next_arrival[l] = gap(world.rng);
  }
  refresh_signal(world);
  return world;
}

void insert_ego(WorldState& world, int lane, double v) {
  const auto& g = world.config.geometry;
  if (lane < 0 || lane >= g.lanes) throw std::invalid_argument("insert_ego: lane out of range");
  world.ego = VehicleState{};
  world.ego.id = 0;
  world.ego.type = VehicleType::Ego;
  world.ego.lane = lane;
  world.ego.x_lat = lane * g.lane_width;
  world.ego.v = v;
  world.has_ego = true;
  const VehicleParams& p = world.ego_params;
  std::erase_if(world.others, [&](const VehicleState& o) {
    if (!o.occupies(lane)) return false;
    const double gap = o.x_lon - g.vehicle_length;
    return gap < required_gap(p.s0, v, o.v, p.b_max) + v * p.headway;
  });
}

void place_blocker(WorldState& world, const Blocker& blocker) {
  const auto& g = world.config.geometry;
  if (blocker.lane < 0 || blocker.lane >= g.lanes) throw std::invalid_argument("place_blocker: lane out of range");
  VehicleState s;
  s.id = world.next_id++;
  s.type = VehicleType::D;
  s.lane = blocker.lane;
  s.x_lat = blocker.lane * g.lane_width;
  s.x_lon = blocker.x_lon;
  s.stalled = true;
  world.others.push_back(s);
}

void spawn_traffic(WorldState& world) {
  const auto& g = world.config.geometry;
  const double now = world.clock();
  std::exponential_distribution<double> gap_draw(world.config.flow_rate > 0.0 ? world.config.flow_rate : 1.0);
  std::uniform_int_distribution<int> type_draw(0, static_cast<int>(kBackgroundTypes.size()) - 1);

  for (int lane = 0; lane < g.lanes; ++lane) {
    while (now >= world.next_arrival[lane]) {
      world.pending[lane].push_back(kBackgroundTypes[type_draw(world.rng)]);
      world.next_arrival[lane] += gap_draw(world.rng);
    }
    if (world.pending[lane].empty()) continue;

    const VehicleType type = world.pending[lane].front();
    const VehicleParams& p = background_params(type);
    // The most upstream occupant of the lane decides whether the entrance is free.
    const VehicleState* last = nullptr;
    auto consider = [&](const VehicleState& s) {
      if (s.occupies(lane) && (!last || s.x_lon < last->x_lon)) last = &s;
    };
    for (const auto& s : world.others) consider(s);
    if (world.has_ego) consider(world.ego);
    if (last) {
      const double gap = last->x_lon - g.vehicle_length;
      if (gap < p.s0 + p.v_tar * p.headway || gap < required_gap(p.s0, p.v_tar, last->v, p.b_max)) continue;
    }
    world.others.push_back(make_background(world, type, lane));
    world.pending[lane].pop_front();
  }
}

std::optional<Leader> leader_in_lane(const WorldState& world, int lane, double x, int self_id) {
  const double length = world.config.geometry.vehicle_length;
  std::optional<Leader> best;
  auto consider = [&](const VehicleState& s) {
    if (s.id == self_id || !s.occupies(lane) || s.x_lon < x) return;
    const double gap = s.x_lon - x - length;
    if (!best || gap < best->gap) best = Leader{gap, s.v};
  };
  for (const auto& s : world.others) consider(s);
  if (world.has_ego) consider(world.ego);
  return best;
}

void advance(WorldState& world, const EgoCommand& command) {
  if (!std::isfinite(command.a_lon)) throw std::invalid_argument("step: non-finite ego acceleration");
  if (command.lane_target < -1 || command.lane_target > 1) throw std::invalid_argument("step: lane target outside {-1,0,1}");

  const auto& cfg = world.config;
  const auto& g = cfg.geometry;
  const double dt = cfg.dt;

  spawn_traffic(world);

  // Background longitudinal control from the pre-step snapshot.
  const LaneIndex index(world);
  std::vector<double> accel(world.others.size());
  for (std::size_t i = 0; i < world.others.size(); ++i) {
    const VehicleState& s = world.others[i];
    const VehicleParams& p = background_params(s.type);
    double a = p.a_max;
    bool constrained = false;
    for (int l = 0; l < g.lanes; ++l) {
      if (!s.occupies(l)) continue;
      if (auto ref = index.leader(l, s.x_lon, s.id)) {
        a = std::min(a, idm_acceleration(s.v, Leader{ref->x - s.x_lon - g.vehicle_length, ref->v}, p));
        constrained = true;
      }
    }
    if (auto line = stop_line_leader(g.stop_line - s.x_lon, s.v, world.phase, p)) {
      a = std::min(a, idm_acceleration(s.v, line, p));
      constrained = true;
    }
    accel[i] = constrained ? a : idm_acceleration(s.v, std::nullopt, p);
    if (s.stalled) accel[i] = 0.0;
  }

  // Background lateral decisions at their own low rate.
  const double now = world.clock();
  for (auto& s : world.others) {
    if (s.stalled || s.lane_change || now < s.next_lateral_decision) continue;
    while (s.next_lateral_decision <= now) s.next_lateral_decision += cfg.lateral_decision_period;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const LateralMove move = lateral_decision(s.lane, g.lanes, unit(s.rng), background_params(s.type));
    if (move == LateralMove::Stay) continue;
    const int target = s.lane + static_cast<int>(move);
    if (lane_entry_safe(world, s, target)) s.lane_change = LaneChange{static_cast<int>(move), 0.0};
  }

  // Ego.
  world.ego_started_lane_change = false;
  double ego_accel = 0.0;
  if (world.has_ego) {
    ego_accel = std::clamp(command.a_lon, -kEgoEmergencyDecel, world.ego_params.a_max);
    const int target = world.ego.lane + command.lane_target;
    if (command.lane_target != 0 && !world.ego.lane_change && target >= 0 && target < g.lanes) {
      world.ego.lane_change = LaneChange{command.lane_target, 0.0};
      world.ego_started_lane_change = true;
      ++world.ego_lane_changes;
    }
  }

  for (std::size_t i = 0; i < world.others.size(); ++i) {
    integrate(world.others[i], accel[i], dt, kInf, g);
  }
  if (world.has_ego) integrate(world.ego, ego_accel, dt, cfg.speed_limit, g);

  const double horizon = g.end() + g.sensor_range;
  std::erase_if(world.others, [&](const VehicleState& s) { return s.x_lon - g.vehicle_length > horizon; });

  ++world.steps;
  refresh_signal(world);

  if (world.has_ego && !world.collision) {
    for (const auto& s : world.others) {
      if (vehicles_collide(world.ego, s, g)) {
        world.collision = true;
        break;
      }
    }
  }
}

WorldState step(const WorldState& world, const EgoCommand& command) {
  WorldState next = world;
  advance(next, command);
  return next;
}

double side_clearance(const WorldState& world, int direction) {
  const auto& g = world.config.geometry;
  const VehicleState& ego = world.ego;
  const int target = ego.lane + direction;
  double clearance = g.sensor_range;
  if (target < 0 || target >= g.lanes) {
    // The carriageway edge is what the side radar sees.
    const double edge = direction < 0 ? -0.5 * g.lane_width : (g.lanes - 0.5) * g.lane_width;
    return std::abs(edge - ego.x_lat) - 0.5 * g.vehicle_width;
  }
  const double length = g.vehicle_length;
  auto consider = [&](const VehicleState& o) {
    if (!o.occupies(target)) return;
    const double dx = o.x_lon - ego.x_lon;
    double reach = 0.0;
    if (dx >= 0.0) {
      const double closing = std::max(0.0, ego.v - o.v);
      reach = length + 2.0 + closing * closing / (2.0 * world.ego_params.b_max);
    } else {
      // Rear zone sized for the weakest-braking class closing in from behind.
      const double closing = std::max(0.0, o.v - ego.v);
      reach = length + 5.0 + closing * closing / (2.0 * 1.5);
    }
    if (std::abs(dx) > reach) return;
    const bool entering = o.lane_change && o.lane + o.lane_change->direction == target;
    const double lateral = entering ? target * g.lane_width : o.x_lat;
    clearance = std::min(clearance, std::abs(lateral - ego.x_lat) - g.vehicle_width);
  };
  for (const auto& o : world.others) consider(o);
  return std::max(0.0, clearance);
}

double adjacent_front_gap(const WorldState& world, int direction) {
  const auto& g = world.config.geometry;
  const int target = world.ego.lane + direction;
  if (target < 0 || target >= g.lanes) return 0.0;
  auto leader = leader_in_lane(world, target, world.ego.x_lon, world.ego.id);
  if (!leader) return g.sensor_range;
  return std::clamp(leader->gap, 0.0, g.sensor_range);
}

Observation observe(const WorldState& world) {
  const auto& g = world.config.geometry;
  const VehicleState& ego = world.ego;
  Observation obs;
  switch (world.phase) {
    case Phase::Green: obs.t_g = world.remaining; break;
    case Phase::Yellow: obs.t_y = world.remaining; break;
    case Phase::Red:
    case Phase::AllRed: obs.t_r = world.remaining; break;
  }

  std::optional<Leader> leader;
  for (int l = 0; l < g.lanes; ++l) {
    if (!ego.occupies(l)) continue;
    auto candidate = leader_in_lane(world, l, ego.x_lon, ego.id);
    if (candidate && (!leader || candidate->gap < leader->gap)) leader = candidate;
  }
  if (leader && leader->gap <= g.sensor_range) {
    obs.d_f = std::max(0.0, leader->gap);
    obs.v_f = leader->v_lead;
    obs.w_f = obs.d_f <= forward_warning_distance(ego.v, obs.v_f, world.ego_params.b_max) ? 1.0 : 0.0;
  } else {
    obs.d_f = g.sensor_range;
    obs.v_f = 0.0;
    obs.w_f = 0.0;
  }
  obs.w_l = side_clearance(world, -1) <= g.side_warning ? 1.0 : 0.0;
  obs.w_r = side_clearance(world, +1) <= g.side_warning ? 1.0 : 0.0;
  obs.w_c = world.collision ? 1.0 : 0.0;
  obs.d_r = g.stop_line - ego.x_lon;
  obs.v = ego.v;
  obs.a = ego.accel;
  return obs;
}

bool vehicles_collide(const VehicleState& a, const VehicleState& b, const RoadGeometry& g) {
  return std::abs(a.x_lon - b.x_lon) < g.vehicle_length && std::abs(a.x_lat - b.x_lat) < g.vehicle_width;
}

}  // namespace ecodrive
