#pragma once

#include <string_view>

namespace ecodrive {

enum class Phase { Green, Yellow, Red, AllRed };

std::string_view to_string(Phase phase);

/// Fixed-time plan. The signal clock is the world clock shifted by phase_offset.
struct SignalTiming {
  double green = 20.0;
  double yellow = 3.0;
  double red = 40.0;
  double all_red = 1.0;
  double phase_offset = 0.0;

  double cycle() const { return green + yellow + red + all_red; }

  /// A plan whose green phase outlasts any episode.
  static SignalTiming always_green();
};

bool is_valid(const SignalTiming& timing);

struct SignalState {
  Phase phase = Phase::Green;
  double remaining = 0.0;  ///< time until the next phase boundary [s]
  double elapsed = 0.0;    ///< time since the current phase began [s]
};

/// Phase order Green -> Yellow -> Red -> AllRed, wrapping every cycle.
/// Zero-length phases are skipped.
SignalState signal_at(double clock, const SignalTiming& timing);

inline bool stop_required(Phase phase) { return phase != Phase::Green; }

}  // namespace ecodrive
