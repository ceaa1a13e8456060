#pragma once

#include <array>
#include <deque>
#include <vector>

#include "ecodrive/world/world.hpp"

namespace ecodrive::rl {

using Frame = std::array<double, Observation::kSize>;

struct StackSpec {
  int select = 4;  ///< N_select: keep every select-th frame
  int stack = 4;   ///< N_stack: number of picks fed to the network

  int span() const { return (stack - 1) * select + 1; }
};

/// Selected frames, oldest first. Always exactly `stack` rows.
using StackedObservation = std::vector<Frame>;

/// Picks the latest frame and every select-th one before it, keeps the
/// latest `stack` picks and pads a short history with the oldest pick.
/// Throws std::invalid_argument on an empty history.
StackedObservation select_stack(const std::vector<Frame>& history, const StackSpec& spec = {});

/// Bounded frame buffer that keeps just enough history for select_stack.
class FrameHistory {
 public:
  explicit FrameHistory(StackSpec spec = {}) : spec_(spec) {}

  void clear() { frames_.clear(); }
  void push(const Frame& frame);
  bool empty() const { return frames_.empty(); }
  std::size_t size() const { return frames_.size(); }

  StackedObservation stacked() const;

 private:
  StackSpec spec_;
  std::deque<Frame> frames_;
};

/// Fixed scaling of the logical observation into roughly unit range.
struct FeatureScale {
  double time = 64.0;
  double road = 550.0;
  double sensor = 100.0;
  double speed = kph(50.0);
  double accel = 3.0;
};

Frame normalize(const Observation& obs, const FeatureScale& scale = {});

/// Flattens a stack row-major (oldest pick first) into the network input.
std::vector<float> flatten(const StackedObservation& stack);

}  // namespace ecodrive::rl
