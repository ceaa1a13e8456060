#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <map>
#include <set>
#include <sstream>

#include "ecodrive/rl/action.hpp"
#include "ecodrive/rl/agent.hpp"
#include "ecodrive/rl/checkpoint.hpp"
#include "ecodrive/rl/env.hpp"
#include "ecodrive/rl/preprocess.hpp"
#include "ecodrive/rl/replay.hpp"
#include "ecodrive/rl/trainer.hpp"
#include "rl_checks.hpp"

using namespace ecodrive;
using namespace ecodrive::rl;

namespace {

std::vector<Frame> numbered_frames(int n) {
  std::vector<Frame> frames(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) frames[static_cast<std::size_t>(i)].fill(i);
  return frames;
}

std::vector<int> frame_ids(const StackedObservation& stack) {
  std::vector<int> ids;
  for (const auto& f : stack) ids.push_back(static_cast<int>(f[0]));
  return ids;
}

NetworkShape tiny_shape() {
  NetworkShape s;
  s.inputs = 48;
  s.stream = {32};
  return s;
}

}  // namespace

TEST_SUITE("rl") {

TEST_CASE("action codec") {
  CHECK(decode(0).a_lon == doctest::Approx(0.6));
  CHECK(decode(4).a_lon == doctest::Approx(3.0));
  CHECK(decode(5).a_lon == doctest::Approx(-0.6));
  CHECK(decode(9).a_lon == doctest::Approx(-3.0));
  CHECK(decode(10).lane_target == -1);
  CHECK(decode(11).lane_target == 0);
  CHECK(decode(11).a_lon == 0.0);
  CHECK(decode(12).lane_target == 1);
  CHECK_THROWS_AS(decode(13), std::out_of_range);
  CHECK_THROWS_AS(decode(-1), std::out_of_range);

  std::set<std::pair<double, int>> seen;
  for (int id = 0; id < kActionCount; ++id) {
    const auto a = decode(id);
    if (a.lane_target != 0) CHECK(a.a_lon == 0.0);
    CHECK(encode(a.a_lon, a.lane_target) == id);
    seen.insert({a.a_lon, a.lane_target});
  }
  CHECK(seen.size() == 13);
  CHECK_FALSE(encode(1.0, 1).has_value());
  CHECK_FALSE(encode(1.0, 0).has_value());
}

TEST_CASE("select stack") {
  CHECK(frame_ids(select_stack(numbered_frames(16))) == std::vector<int>{3, 7, 11, 15});
  CHECK(frame_ids(select_stack(numbered_frames(17))) == std::vector<int>{4, 8, 12, 16});
  CHECK(frame_ids(select_stack(numbered_frames(1))) == std::vector<int>{0, 0, 0, 0});
  CHECK(frame_ids(select_stack(numbered_frames(6))) == std::vector<int>{1, 1, 1, 5});
  CHECK_THROWS_AS(select_stack({}), std::invalid_argument);

  FrameHistory history;
  for (const auto& f : numbered_frames(40)) history.push(f);
  CHECK(history.size() == 13);
  CHECK(frame_ids(history.stacked()) == std::vector<int>{27, 31, 35, 39});
  CHECK(flatten(history.stacked()).size() == 48);
}

TEST_CASE("dueling head arithmetic") {
  NetworkShape shape;
  shape.inputs = 1;
  shape.stream = {};
  shape.actions = 2;
  DuelingNetwork<double> net(shape, 1);
  auto& layers = net.layers();
  REQUIRE(layers.size() == 2);
  layers[0].W.setZero();
  layers[0].b << 1.0;
  layers[1].W.setZero();
  layers[1].b << 0.5, -0.5;
  const auto q = net.forward(Eigen::MatrixXd::Ones(1, 1));
  CHECK(q(0, 0) == doctest::Approx(1.5));
  CHECK(q(1, 0) == doctest::Approx(0.5));
}

TEST_CASE("dueling identity holds for random parameters") {
  CHECK(checks::dueling_identity_error(100, 21) < 1e-6);
}

TEST_CASE("gradients match finite differences") {
  CHECK(checks::gradient_check_error(5) < 1e-4);
}

TEST_CASE("greedy and epsilon greedy") {
  std::vector<double> q(13, 0.0);
  q[2] = q[5] = 1.0;
  CHECK(greedy(q) == 2);

  std::mt19937_64 rng(9);
  std::vector<long> counts(13, 0);
  for (int i = 0; i < 10000; ++i) ++counts[static_cast<std::size_t>(epsilon_greedy(q, 1.0, rng))];
  CHECK(checks::chi_square_p(counts, std::vector<double>(13, 1.0 / 13.0)) > 0.01);
  for (int i = 0; i < 100; ++i) CHECK(epsilon_greedy(q, 0.0, rng) == 2);
}

TEST_CASE("exploration schedule") {
  TrainConfig c;
  c.total_steps = 1000;
  c.warmup = 0;
  CHECK(epsilon_at(0, c) == 1.0);
  CHECK(epsilon_at(500, c) == doctest::Approx(0.5 * (1.0 + 1e-5)));
  CHECK(epsilon_at(1000, c) == doctest::Approx(1e-5));
  CHECK(epsilon_at(5000, c) == doctest::Approx(1e-5));
  CHECK(beta_at(0, c) == doctest::Approx(0.4));
  CHECK(beta_at(1000, c) == doctest::Approx(1.0));
  for (long s = 1; s <= 1000; ++s) CHECK(epsilon_at(s, c) <= epsilon_at(s - 1, c));

  c.gamma = 1.0;
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
}

TEST_CASE("sum tree") {
  SumTree tree(5);
  const double values[] = {1.0, 2.0, 3.0, 4.0, 0.0};
  for (std::size_t i = 0; i < 5; ++i) tree.set(i, values[i]);
  CHECK(tree.total() == doctest::Approx(10.0));
  CHECK(tree.find(0.5) == 0);
  CHECK(tree.find(1.5) == 1);
  CHECK(tree.find(5.9) == 2);
  CHECK(tree.find(9.99) == 3);
  tree.set(1, 0.0);
  CHECK(tree.total() == doctest::Approx(8.0));
  CHECK(tree.find(1.5) == 2);

  MinTree mins(5);
  for (std::size_t i = 0; i < 5; ++i) mins.set(i, values[i] + 1.0);
  CHECK(mins.min() == 1.0);
}

TEST_CASE("replay sampling is proportional") {
  CHECK(checks::replay_sampling_p(std::vector<double>(16, 1.0), 100000, 1) > 0.01);
  std::vector<double> skewed(16, 1.0);
  skewed[3] = 10.0;
  CHECK(checks::replay_sampling_p(skewed, 100000, 2) > 0.01);
}

TEST_CASE("replay bookkeeping") {
  ReplayConfig cfg;
  cfg.capacity = 4;
  PrioritizedReplay replay(2, cfg);
  std::mt19937_64 rng(3);
  CHECK_THROWS_AS(replay.sample(1, 0.4, rng), std::logic_error);
  for (int i = 0; i < 6; ++i) replay.add({{float(i), 0.0F}, i % 13, float(i), {0.0F, 0.0F}, i == 5});
  CHECK(replay.size() == 4);
  // FIFO: slots 0 and 1 now hold the fifth and sixth transitions.
  CHECK(replay.reward(0) == 4.0F);
  CHECK(replay.reward(1) == 5.0F);
  CHECK(replay.done(1));
  CHECK(replay.state(2)[0] == 2.0F);

  const auto uniform = replay.sample(64, 1.0, rng);
  for (double w : uniform.weights) CHECK(w == doctest::Approx(1.0));

  replay.update({0, 2}, {0.5, -2.0});
  CHECK(replay.priority(0) == doctest::Approx(std::pow(0.5 + 1e-3, 0.6)));
  CHECK(replay.priority(2) == doctest::Approx(std::pow(2.0 + 1e-3, 0.6)));
  CHECK_THROWS(replay.update({0}, {std::nan("")}));

  const auto batch = replay.sample(256, 1.0, rng);
  double largest = 0.0;
  for (std::size_t k = 0; k < batch.indices.size(); ++k) {
    const double p = replay.probability(batch.indices[k]);
    const double min_p = replay.priority(0) / (replay.priority(0) + replay.priority(1) + replay.priority(2) + replay.priority(3));
    CHECK(batch.weights[k] == doctest::Approx(std::pow(p / min_p, -1.0)));
    largest = std::max(largest, batch.weights[k]);
  }
  CHECK(largest <= 1.0 + 1e-12);
}

TEST_CASE("terminal target is the reward") {
  Network online(tiny_shape(), 4), target(tiny_shape(), 5);
  ReplayConfig cfg;
  cfg.capacity = 8;
  PrioritizedReplay replay(48, cfg);
  Transition t;
  t.state.assign(48, 0.25F);
  t.next_state.assign(48, -0.5F);
  t.action = 3;
  t.reward = 1.7F;
  t.done = true;
  replay.add(t);

  TrainConfig tc;
  tc.learning_rate = 1e-3;
  Adam<float> adam(online, {tc.learning_rate});
  ReplayBatch batch{{0}, {1.0}};
  const double q0 = q_values(online, t.state)[3];
  auto first = train_step(online, target, adam, replay, batch, tc);
  CHECK(first.td_errors[0] == doctest::Approx(q0 - 1.7).epsilon(1e-5));

  for (int i = 0; i < 200; ++i) train_step(online, target, adam, replay, batch, tc);
  CHECK(q_values(online, t.state)[3] == doctest::Approx(1.7).epsilon(1e-2 / 1.7));
}

TEST_CASE("zero discount ignores the next state") {
  Network online(tiny_shape(), 6), target(tiny_shape(), 7);
  PrioritizedReplay replay(48, ReplayConfig{});
  Transition t;
  t.state.assign(48, 0.1F);
  t.next_state.assign(48, 3.0F);
  t.action = 8;
  t.reward = -0.4F;
  replay.add(t);
  TrainConfig tc;
  tc.gamma = 0.0;
  Adam<float> adam(online, {tc.learning_rate});
  const double q0 = q_values(online, t.state)[8];
  const auto r = train_step(online, target, adam, replay, {{0}, {1.0}}, tc);
  CHECK(r.td_errors[0] == doctest::Approx(q0 + 0.4).epsilon(1e-5));
  CHECK(r.loss == doctest::Approx((q0 + 0.4) * (q0 + 0.4)).epsilon(1e-4));
}

TEST_CASE("checkpoint round trip") {
  Network net(tiny_shape(), 12);
  const auto hash = config_hash(tiny_shape(), StackSpec{}, FeatureScale{});
  std::stringstream buffer;
  save_checkpoint(buffer, net, hash);
  const std::string text = buffer.str();

  std::istringstream in(text);
  const auto loaded = load_checkpoint(in, hash);
  CHECK(loaded.hash == hash);
  REQUIRE(loaded.network.layers().size() == net.layers().size());
  for (std::size_t l = 0; l < net.layers().size(); ++l) {
    CHECK(loaded.network.layers()[l].W == net.layers()[l].W);
    CHECK(loaded.network.layers()[l].b == net.layers()[l].b);
  }
  std::vector<float> s(48, 0.3F);
  CHECK(q_values(loaded.network, s) == q_values(net, s));

  std::istringstream again(text);
  CHECK_THROWS_AS(load_checkpoint(again, hash + 1), std::runtime_error);
  std::istringstream broken(text.substr(0, text.size() / 2));
  CHECK_THROWS_AS(load_checkpoint(broken), std::runtime_error);
  CHECK(config_hash(tiny_shape(), StackSpec{8, 4}, FeatureScale{}) != hash);
}

TEST_CASE("driving environment") {
  EnvConfig cfg;
  cfg.episode.scenario.flow_rate = 0.0;
  cfg.episode.scenario.warmup = 0.0;
  cfg.episode.scenario.signal = SignalTiming::always_green();
  DrivingEnv env(cfg);
  ScenarioConfig sc = cfg.episode.scenario;
  sc.entry_speed = 10.0;
  const auto s0 = env.reset(sc);
  CHECK(s0.size() == 48);
  CHECK(env.active());

  const auto step = env.step(4);
  CHECK(step.state.size() == 48);
  CHECK(env.episode().steps() == cfg.decision_interval);
  CHECK(env.episode().world().ego.v == doctest::Approx(10.0 + 3.0 * 0.02 * cfg.decision_interval));
  CHECK_FALSE(step.done);

  long decisions = 0;
  EnvStep last;
  while (env.active()) {
    last = env.step(4);
    ++decisions;
  }
  CHECK(last.done);
  CHECK(last.terminal);
  CHECK(env.episode().status() == EpisodeStatus::Success);
  CHECK(env.episode().world().ego.x_lon >= 550.0);
}

TEST_CASE("training curve csv round trip") {
  std::vector<CurveRow> rows{{1, 120, 9.5, 123456.5, 14.25, 1, 33.125}, {2, 260, 11.0, 98765.0, -2.5, 0, -4.0}};
  std::stringstream buffer;
  write_curve_csv(buffer, rows);
  CHECK(buffer.str().rfind("episode,steps,avg_speed,energy_J,R_GP,lane_changes,return\n", 0) == 0);
  const auto back = read_curve_csv(buffer);
  REQUIRE(back.size() == 2);
  CHECK(back[1].episode == 2);
  CHECK(back[1].steps == 260);
  CHECK(back[0].energy_J == 123456.5);
  CHECK(back[1].R_GP == -2.5);
  CHECK(back[0].ret == 33.125);
}

TEST_CASE("short training run is reproducible") {
  EnvConfig env;
  env.episode.scenario.flow_rate = 0.0;
  env.episode.scenario.warmup = 0.0;
  env.episode.scenario.signal = SignalTiming::always_green();
  env.decision_interval = 25;
  TrainConfig tc;
  tc.network = tiny_shape();
  tc.total_steps = 300;
  tc.warmup = 64;
  tc.target_sync = 50;
  tc.batch = 16;
  tc.eval_every = 0;
  auto sampler = random_entry_sampler(env.episode.scenario);
  const auto a = train(env, sampler, tc);
  const auto b = train(env, sampler, tc);
  CHECK(a.steps == 300);
  CHECK(a.target_syncs == b.target_syncs);
  REQUIRE(a.curve.size() == b.curve.size());
  REQUIRE_FALSE(a.curve.empty());
  for (std::size_t i = 0; i < a.curve.size(); ++i) CHECK(a.curve[i].ret == b.curve[i].ret);
  std::vector<float> s(48, 0.2F);
  CHECK(q_values(a.network, s) == q_values(b.network, s));
}

}
