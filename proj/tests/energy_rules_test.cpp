#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <random>

#include "ecodrive/energy.hpp"
#include "ecodrive/rules.hpp"
#include "ecodrive/trajectory.hpp"

using namespace ecodrive;

TEST_SUITE("energy") {

TEST_CASE("worked example") {
  // (1500*1 + 1500*9.81*0.01 + 0.5*1.2*0.8*100) * 10 * 0.02 / 0.85
  const double force = 1500.0 + 147.15 + 48.0;
  const double expected = force * 10.0 * 0.02 / 0.85;
  CHECK(step_energy(10.0, 1.0, EnergyParams{}, 0.02) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(398.86).epsilon(1e-4));
}

TEST_CASE("braking and standstill cost nothing") {
  const EnergyParams p;
  CHECK(step_energy(10.0, -1.0, p, 0.02) == 0.0);
  CHECK(step_energy(10.0, -1e-15, p, 0.02) == 0.0);
  CHECK(step_energy(0.0, 0.0, p, 0.02) == 0.0);
  CHECK(step_energy(0.0, 2.0, p, 0.02) == 0.0);
}

TEST_CASE("regen returns energy when braking") {
  const EnergyParams p;
  const double wheel = tractive_power(10.0, -2.0, p);
  REQUIRE(wheel < 0.0);
  CHECK(step_energy(10.0, -2.0, p, 0.02, true) == doctest::Approx(-0.6 * -wheel * 0.02));
  // Light braking that does not beat the resistances still draws power.
  CHECK(step_energy(10.0, -0.05, p, 0.02, true) > 0.0);
  CHECK(step_energy(10.0, 1.0, p, 0.02, true) == step_energy(10.0, 1.0, p, 0.02, false));
}

TEST_CASE("auxiliary load is charged while driving") {
  EnergyParams p;
  p.aux_power = 500.0;
  CHECK(step_energy(0.0, 0.0, p, 0.02) == doctest::Approx(10.0));
}

TEST_CASE("journey energy sums and concatenates") {
  TrajectoryLog empty;
  CHECK(journey_energy(empty) == 0.0);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> accel(-3.0, 3.0), speed(0.0, 14.0);
  TrajectoryLog a, b, ab;
  for (int i = 0; i < 50; ++i) {
    TrajectoryRecord r;
    r.v = speed(rng);
    r.a = accel(rng);
    r.energy_step_J = step_energy(r.v, r.a, EnergyParams{}, 0.02);
    (i < 20 ? a : b).records.push_back(r);
    ab.records.push_back(r);
  }
  CHECK(journey_energy(ab) == doctest::Approx(journey_energy(a) + journey_energy(b)));

  double prefix = 0.0;
  TrajectoryLog grow;
  for (const auto& r : ab.records) {
    grow.records.push_back(r);
    const double e = journey_energy(grow);
    CHECK(e >= prefix);
    prefix = e;
  }

  TrajectoryLog coasting;
  for (int i = 0; i < 10; ++i) {
    TrajectoryRecord r;
    r.v = 10.0 - i;
    r.a = -1.0;
    r.energy_step_J = step_energy(r.v, r.a, EnergyParams{}, 0.02);
    coasting.records.push_back(r);
  }
  CHECK(journey_energy(coasting) == 0.0);
}

}

TEST_SUITE("rules") {

namespace {

Observation open_road(double v) {
  Observation obs;
  obs.t_g = 15.0;
  obs.d_f = 100.0;
  obs.d_r = 300.0;
  obs.v = v;
  return obs;
}

VehicleState ego_at(double v) {
  VehicleState s;
  s.type = VehicleType::Ego;
  s.v = v;
  return s;
}

}  // namespace

TEST_CASE("emergency braking") {
  const RuleConfig c;
  CHECK(eb_policy(10.0, c) == -5.0);
  CHECK(eb_policy(0.05, c) == doctest::Approx(-2.5));
  CHECK(eb_policy(0.0, c) == 0.0);
}

TEST_CASE("stop in red warning") {
  const RuleConfig c;
  CHECK(sir_warning(30.0, Phase::Red, c));
  CHECK(sir_warning(30.0, Phase::Yellow, c));
  CHECK(sir_warning(30.0, Phase::AllRed, c));
  CHECK_FALSE(sir_warning(30.0, Phase::Green, c));
  CHECK_FALSE(sir_warning(200.0, Phase::Red, c));
  CHECK_FALSE(sir_warning(0.0, Phase::Red, c));
  CHECK(sir_warning(60.0, Phase::Red, c));
}

TEST_CASE("decision manager priorities") {
  const RuleConfig c;
  const VehicleParams ego = ego_params(kph(50.0));
  const ManagedAction rl{1.8, 0, ActionSource::RL};

  Observation obs = open_road(10.0);
  obs.w_f = 1.0;
  obs.t_g = 0.0;
  obs.t_r = 10.0;
  obs.d_r = 30.0;
  CHECK(decision_manager(obs, rl, ego_at(10.0), ego, c).source == ActionSource::EB);
  CHECK(decision_manager(obs, rl, ego_at(10.0), ego, c).a_lon == -5.0);

  obs.w_f = 0.0;
  const auto stop = decision_manager(obs, rl, ego_at(10.0), ego, c);
  CHECK(stop.source == ActionSource::SiRStop);
  CHECK(stop.a_lon == doctest::Approx(-100.0 / (2.0 * 28.0)));
  CHECK(stop.lane_target == 0);

  Observation start = open_road(0.0);
  start.d_r = 3.0;
  const auto go = decision_manager(start, rl, ego_at(0.0), ego, c);
  CHECK(go.source == ActionSource::IDM);
  CHECK(go.a_lon == doctest::Approx(3.0));

  const auto pass = decision_manager(open_road(10.0), ManagedAction{0.0, 1, ActionSource::RL}, ego_at(10.0), ego, c);
  CHECK(pass.source == ActionSource::RL);
  CHECK(pass.a_lon == 0.0);
  CHECK(pass.lane_target == 1);
}

TEST_CASE("stop in red always halts before the line") {
  RuleConfig c;
  const VehicleParams ego = ego_params(kph(50.0));
  for (double v0 = 1.0; v0 <= 13.9; v0 += 0.5) {
    const double start = v0 * v0 / 6.0 + c.stop_standoff;
    double x = 0.0, v = v0;
    for (int k = 0; k < 100000 && v > 0.0; ++k) {
      Observation obs;
      obs.t_r = 30.0;
      obs.d_f = 100.0;
      obs.d_r = start - x;
      obs.v = v;
      const double a = decision_manager(obs, {3.0, 0, ActionSource::RL}, ego_at(v), ego, c).a_lon;
      v = std::max(0.0, v + a * c.dt);
      x += v * c.dt;
    }
    CHECK(v == 0.0);
    CHECK(x < start);
  }
}

TEST_CASE("sbr gate") {
  const RuleConfig c;
  auto veto = sbr_filter({0.0, 1, ActionSource::RL}, false, false, true, 10.0, c);
  CHECK(veto.action.lane_target == 0);
  CHECK(veto.action.a_lon == 0.0);
  CHECK(veto.danger);
  CHECK_FALSE(veto.eb_override);

  auto eb = sbr_filter({1.8, 0, ActionSource::RL}, true, false, false, 10.0, c);
  CHECK(eb.action.a_lon == -5.0);
  CHECK(eb.action.lane_target == 0);
  CHECK(eb.eb_override);

  auto clean = sbr_filter({1.2, -1, ActionSource::RL}, false, false, true, 10.0, c);
  CHECK(clean.action.a_lon == 1.2);
  CHECK(clean.action.lane_target == -1);
  CHECK_FALSE(clean.danger);
}

TEST_CASE("sbr post-condition on random inputs") {
  const RuleConfig c;
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> bit(0, 1), lat(-1, 1);
  std::uniform_real_distribution<double> a(-3.0, 3.0), v(0.0, 14.0);
  for (int i = 0; i < 1000; ++i) {
    const bool wf = bit(rng), wl = bit(rng), wr = bit(rng);
    const auto out = sbr_filter({a(rng), lat(rng), ActionSource::RL}, wf, wl, wr, v(rng), c).action;
    if (wl) CHECK(out.lane_target >= 0);
    if (wr) CHECK(out.lane_target <= 0);
    if (wf) CHECK(out.a_lon <= 0.0);
  }
}

TEST_CASE("kinematic forward check") {
  const RuleConfig c;
  // Ego at 13 closing on a leader at 8: stop distances 0.26 + 16.9 and 5.33.
  const double need = 1.0 + 13.0 * 0.02 + 169.0 / 10.0 - 64.0 / 12.0;
  CHECK(kinematic_gap(13.0, 8.0, c) == doctest::Approx(need));
  CHECK(kinematic_gap(5.0, 14.0, c) == doctest::Approx(1.0));
  Observation obs = open_road(13.0);
  obs.v_f = 8.0;
  obs.d_f = need + 0.1;
  CHECK_FALSE(forward_danger(obs, c));
  obs.d_f = need - 0.1;
  CHECK(forward_danger(obs, c));
  obs.d_f = 100.0;
  CHECK_FALSE(forward_danger(obs, c));
}

TEST_CASE("baseline lane change") {
  const RuleConfig c;
  LaneChangeContext ctx{4.0, 5.0, 13.89, 3.2, 40.0, 20.0, false, false};
  CHECK(baseline_lane_change(ctx, c) == -1);
  ctx.left_blocked = true;
  CHECK(baseline_lane_change(ctx, c) == 1);
  ctx.right_blocked = true;
  CHECK(baseline_lane_change(ctx, c) == 0);
  ctx = {20.0, 5.0, 13.89, 3.2, 40.0, 20.0, false, false};
  CHECK(baseline_lane_change(ctx, c) == 0);
  ctx = {4.0, 5.0, 13.89, 2.0, 40.0, 20.0, false, false};
  CHECK(baseline_lane_change(ctx, c) == 0);

  BaselineLaneChanger changer(c);
  Observation obs = open_road(5.0);
  obs.d_f = 4.0;
  obs.v_f = 5.0;
  int issued = 0, step = 0;
  for (; step < 400 && issued == 0; ++step) issued = changer.update(obs, 13.89, 50.0, 30.0, false);
  CHECK(issued == -1);
  CHECK(step == 150);
}

}
