#include "ecodrive/world/signal.hpp"

#include <cmath>

namespace ecodrive {

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::Green: return "green";
    case Phase::Yellow: return "yellow";
    case Phase::Red: return "red";
    case Phase::AllRed: return "allred";
  }
  return "?";
}

SignalTiming SignalTiming::always_green() { return {1.0e6, 0.0, 0.0, 0.0, 0.0}; }

bool is_valid(const SignalTiming& t) {
  return t.green >= 0.0 && t.yellow >= 0.0 && t.red >= 0.0 && t.all_red >= 0.0 && t.cycle() > 0.0 &&
         std::isfinite(t.phase_offset);
}

SignalState signal_at(double clock, const SignalTiming& timing) {
  const double cycle = timing.cycle();
  double tau = std::fmod(clock + timing.phase_offset, cycle);
  if (tau < 0.0) tau += cycle;

  const double durations[4] = {timing.green, timing.yellow, timing.red, timing.all_red};
  const Phase phases[4] = {Phase::Green, Phase::Yellow, Phase::Red, Phase::AllRed};
  for (int i = 0; i < 4; ++i) {
    if (tau < durations[i]) return {phases[i], durations[i] - tau, tau};
    tau -= durations[i];
  }
  // fmod rounding can leave tau a hair below cycle; that instant belongs to the next green.
  for (int i = 0; i < 4; ++i) {
    if (durations[i] > 0.0) return {phases[i], durations[i], 0.0};
  }
  return {Phase::Green, 0.0, 0.0};
}

}  // namespace ecodrive
