#include "ecodrive/rl/preprocess.hpp"

#include <algorithm>
#include <stdexcept>

namespace ecodrive::rl {

StackedObservation select_stack(const std::vector<Frame>& history, const StackSpec& spec) {
  if (history.empty()) throw std::invalid_argument("select_stack: empty frame history");
  if (spec.select < 1 || spec.stack < 1) throw std::invalid_argument("select_stack: bad stack spec");
  StackedObservation picks;
  const long latest = static_cast<long>(history.size()) - 1;
  for (long i = latest; i >= 0 && static_cast<int>(picks.size()) < spec.stack; i -= spec.select) {
    picks.push_back(history[static_cast<std::size_t>(i)]);
  }
  while (static_cast<int>(picks.size()) < spec.stack) picks.push_back(picks.back());
  std::reverse(picks.begin(), picks.end());
  return picks;
}

void FrameHistory::push(const Frame& frame) {
  frames_.push_back(frame);
  while (static_cast<int>(frames_.size()) > spec_.span()) frames_.pop_front();
}

StackedObservation FrameHistory::stacked() const {
  return select_stack(std::vector<Frame>(frames_.begin(), frames_.end()), spec_);
}

Frame normalize(const Observation& obs, const FeatureScale& s) {
  auto time = [&](double t) { return std::clamp(t / s.time, 0.0, 1.0); };
  return {time(obs.t_g), time(obs.t_y), time(obs.t_r), obs.w_f, obs.w_l, obs.w_r, obs.w_c,
          obs.d_r / s.road, obs.d_f / s.sensor, obs.v_f / s.speed, obs.v / s.speed, obs.a / s.accel};
}

std::vector<float> flatten(const StackedObservation& stack) {
  std::vector<float> out;
  out.reserve(stack.size() * Observation::kSize);
  for (const auto& frame : stack) {
    for (double value : frame) out.push_back(static_cast<float>(value));
  }
  return out;
}

}  // namespace ecodrive::rl
