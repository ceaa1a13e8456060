#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ecodrive/trajectory.hpp"

namespace ecodrive::harness {

struct SeriesPoint {
  double t = 0.0;
  double distance = 0.0;  ///< clipped to the end of the road
  double v = 0.0;
  std::string phase;  ///< signal colour label at t
};

/// Time-speed and time-distance series of one journey with phase labels.
std::vector<SeriesPoint> journey_series(const TrajectoryLog& log, double road_end);
void write_series_csv(std::ostream& out, const std::vector<SeriesPoint>& series);

}  // namespace ecodrive::harness
