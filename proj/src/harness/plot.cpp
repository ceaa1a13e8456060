#include "ecodrive/harness/plot.hpp"

#include <algorithm>
#include <ostream>

#include "ecodrive/csv.hpp"

namespace ecodrive::harness {

std::vector<SeriesPoint> journey_series(const TrajectoryLog& log, double road_end) {
  std::vector<SeriesPoint> out;
  out.reserve(log.records.size());
  for (const auto& r : log.records) {
    out.push_back({r.t, std::min(r.x_lon, road_end), r.v, std::string(to_string(r.phase))});
  }
  return out;
}

void write_series_csv(std::ostream& out, const std::vector<SeriesPoint>& series) {
  out << "t,distance,v,phase\n";
  for (const auto& p : series) {
    out << csv::num(p.t, 10) << ',' << csv::num(p.distance, 10) << ',' << csv::num(p.v, 10) << ',' << p.phase << '\n';
  }
}

}  // namespace ecodrive::harness
