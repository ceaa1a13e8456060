#include "ecodrive/trajectory.hpp"

#include <ostream>
#include <stdexcept>
#include <string>

#include "ecodrive/csv.hpp"

namespace ecodrive {

namespace {
constexpr const char* kColumns = "t,x_lon,lane,v,a,phase,T_r,d_f,v_f,w_f,w_l,w_r,energy_step_J,reward";
constexpr const char* kTermColumns = ",R_velocity,R_energy,R_time,R_lanechange,R_danger,R_GP";
}  // namespace

Phase parse_phase(const std::string& text) {
  if (text == "green") return Phase::Green;
  if (text == "yellow") return Phase::Yellow;
  if (text == "red") return Phase::Red;
  if (text == "allred") return Phase::AllRed;
  throw std::runtime_error("unknown phase '" + text + "'");
}

void write_csv(std::ostream& out, const TrajectoryLog& log) {
  out << kColumns;
  if (log.verbose) out << kTermColumns;
  out << '\n';
  for (const auto& r : log.records) {
    out << csv::num(r.t, 10) << ',' << csv::num(r.x_lon, 10) << ',' << r.lane << ',' << csv::num(r.v, 10) << ','
        << csv::num(r.a, 10) << ',' << to_string(r.phase) << ',' << csv::num(r.T_r, 10) << ','
        << csv::num(r.d_f, 10) << ',' << csv::num(r.v_f, 10) << ',' << r.w_f << ',' << r.w_l << ',' << r.w_r << ','
        << csv::num(r.energy_step_J, 10) << ',' << csv::num(r.reward, 10);
    if (log.verbose) {
      const RewardTerms terms = r.terms.value_or(RewardTerms{});
      out << ',' << csv::num(terms.velocity, 10) << ',' << csv::num(terms.energy, 10) << ','
          << csv::num(terms.time, 10) << ',' << csv::num(terms.lane_change, 10) << ','
          << csv::num(terms.danger, 10) << ',' << csv::num(terms.green_pass, 10);
    }
    out << '\n';
  }
}

TrajectoryLog read_trajectory_csv(std::istream& in) {
  const auto header = csv::read_header(in);
  TrajectoryLog log;
  log.verbose = header.size() > 14;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = csv::split(line);
    if (f.size() != header.size()) throw std::runtime_error("trajectory csv: ragged row");
    TrajectoryRecord r;
    r.t = csv::to_double(f[0]);
    r.x_lon = csv::to_double(f[1]);
    r.lane = static_cast<int>(csv::to_int(f[2]));
    r.v = csv::to_double(f[3]);
    r.a = csv::to_double(f[4]);
    r.phase = parse_phase(f[5]);
    r.T_r = csv::to_double(f[6]);
    r.d_f = csv::to_double(f[7]);
    r.v_f = csv::to_double(f[8]);
    r.w_f = static_cast<int>(csv::to_int(f[9]));
    r.w_l = static_cast<int>(csv::to_int(f[10]));
    r.w_r = static_cast<int>(csv::to_int(f[11]));
    r.energy_step_J = csv::to_double(f[12]);
    r.reward = csv::to_double(f[13]);
    if (log.verbose) {
      r.terms = RewardTerms{csv::to_double(f[14]), csv::to_double(f[15]), csv::to_double(f[16]),
                            csv::to_double(f[17]), csv::to_double(f[18]), csv::to_double(f[19])};
    }
    log.records.push_back(r);
  }
  return log;
}

}  // namespace ecodrive
