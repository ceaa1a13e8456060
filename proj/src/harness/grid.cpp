#include "ecodrive/harness/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>
#include <tuple>

#include "ecodrive/csv.hpp"

namespace ecodrive::harness {
namespace {

struct Job {
  Method method;
  double C;
  double S;
  int seed;
};

std::vector<Job> jobs_for(const GridSpec& spec) {
  std::vector<Job> jobs;
  for (Method m : spec.methods)
    for (double c : spec.entry_times)
      for (double s : spec.entry_speeds)
        for (int k = 0; k < spec.seeds; ++k) jobs.push_back({m, c, s, k});
  return jobs;
}

void check_runnable(const GridSpec& spec, const rl::Network* network) {
  if (!network && std::find(spec.methods.begin(), spec.methods.end(), Method::HRL) != spec.methods.end())
    throw std::invalid_argument("grid: HRL requested without a network");
}

std::string cell_label(double value) { return csv::num(value); }

using CellKey = std::tuple<int, double, double>;

}  // namespace

std::vector<MetricsRow> grid_eval_serial(const AppConfig& config, const GridSpec& spec, const rl::Network* network) {
  check_runnable(spec, network);
  std::vector<MetricsRow> rows;
  for (const Job& j : jobs_for(spec)) rows.push_back(run_episode(j.method, j.C, j.S, j.seed, config, network).row);
  std::sort(rows.begin(), rows.end(), row_less);
  return rows;
}

std::vector<MetricsRow> grid_eval(const AppConfig& config, const GridSpec& spec, const rl::Network* network) {
  check_runnable(spec, network);
  const std::vector<Job> jobs = jobs_for(spec);
  std::vector<MetricsRow> rows(jobs.size());
  std::vector<std::string> errors(jobs.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < static_cast<long>(jobs.size()); ++i) {
    const Job& j = jobs[static_cast<std::size_t>(i)];
    try {
      rows[static_cast<std::size_t>(i)] = run_episode(j.method, j.C, j.S, j.seed, config, network).row;
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(i)] = e.what();
    }
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw std::runtime_error("grid: " + e);
  }
  std::sort(rows.begin(), rows.end(), row_less);
  return rows;
}

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows) {
  out << "method,C,S,seed,travel_time,energy,lane_changes,collisions,status\n";
  for (const auto& r : rows) {
    out << to_string(r.method) << ',' << csv::num(r.C) << ',' << csv::num(r.S) << ',' << r.seed << ','
        << csv::num(r.travel_time) << ',' << csv::num(r.energy) << ',' << r.lane_changes << ',' << r.collisions
        << ',' << to_string(r.status) << '\n';
  }
}

std::vector<MetricsRow> read_metrics_csv(std::istream& in) {
  const auto header = csv::read_header(in);
  if (header.size() != 9 || header[0] != "method") throw std::runtime_error("metrics csv: unexpected header");
  std::vector<MetricsRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = csv::split(line);
    if (f.size() != 9) throw std::runtime_error("metrics csv: ragged row");
    MetricsRow r;
    r.method = parse_method(f[0]);
    r.C = csv::to_double(f[1]);
    r.S = csv::to_double(f[2]);
    r.seed = static_cast<int>(csv::to_int(f[3]));
    r.travel_time = csv::to_double(f[4]);
    r.energy = csv::to_double(f[5]);
    r.lane_changes = static_cast<int>(csv::to_int(f[6]));
    r.collisions = static_cast<int>(csv::to_int(f[7]));
    r.status = parse_status(f[8]);
    rows.push_back(r);
  }
  return rows;
}

std::vector<CellSummary> summarize(const std::vector<MetricsRow>& rows) {
  std::map<CellKey, std::vector<const MetricsRow*>> groups;
  for (const auto& r : rows) groups[{static_cast<int>(r.method), r.C, r.S}].push_back(&r);
  std::vector<CellSummary> out;
  for (const auto& [key, members] : groups) {
    CellSummary c;
    c.method = static_cast<Method>(std::get<0>(key));
    c.C = std::get<1>(key);
    c.S = std::get<2>(key);
    c.runs = static_cast<int>(members.size());
    double e = 0.0, e2 = 0.0, t = 0.0, t2 = 0.0;
    for (const MetricsRow* r : members) {
      c.collisions += r->collisions;
      const bool done = r->status == EpisodeStatus::Success || r->status == EpisodeStatus::Infeasible;
      if (!done) continue;
      ++c.completed;
      e += r->energy;
      e2 += r->energy * r->energy;
      t += r->travel_time;
      t2 += r->travel_time * r->travel_time;
    }
    if (c.completed > 0) {
      const double n = c.completed;
      c.energy_mean = e / n;
      c.time_mean = t / n;
      c.energy_std = std::sqrt(std::max(0.0, e2 / n - c.energy_mean * c.energy_mean));
      c.time_std = std::sqrt(std::max(0.0, t2 / n - c.time_mean * c.time_mean));
    }
    out.push_back(c);
  }
  return out;
}

void write_summary_csv(std::ostream& out, const std::vector<CellSummary>& cells) {
  out << "method,C,S,runs,completed,energy_mean,energy_std,travel_time_mean,travel_time_std,collisions\n";
  for (const auto& c : cells) {
    out << to_string(c.method) << ',' << csv::num(c.C) << ',' << csv::num(c.S) << ',' << c.runs << ','
        << c.completed << ',' << csv::num(c.energy_mean) << ',' << csv::num(c.energy_std) << ','
        << csv::num(c.time_mean) << ',' << csv::num(c.time_std) << ',' << c.collisions << '\n';
  }
}

double improvement(double reference, double value) { return (reference - value) / reference * 100.0; }

std::vector<ImprovementRow> improvement_table(const std::vector<CellSummary>& cells, const GridSpec& spec,
                                              Method method, Method reference) {
  std::map<CellKey, const CellSummary*> index;
  for (const auto& c : cells) index[{static_cast<int>(c.method), c.C, c.S}] = &c;
  auto find = [&](Method m, double C, double S) -> const CellSummary* {
    auto it = index.find({static_cast<int>(m), C, S});
    if (it == index.end() || it->second->completed == 0) return nullptr;
    return it->second;
  };
  std::vector<ImprovementRow> out;
  for (double C : spec.entry_times) {
    for (double S : spec.entry_speeds) {
      ImprovementRow r{method, reference, C, S, 0.0, 0.0, false};
      const CellSummary* m = find(method, C, S);
      const CellSummary* ref = find(reference, C, S);
      if (!m || !ref) {
        r.missing = true;
        r.energy_imp = r.time_imp = std::numeric_limits<double>::quiet_NaN();
      } else {
        r.energy_imp = improvement(ref->energy_mean, m->energy_mean);
        r.time_imp = improvement(ref->time_mean, m->time_mean);
      }
      out.push_back(r);
    }
  }
  return out;
}

void write_improvement_csv(std::ostream& out, const std::vector<ImprovementRow>& rows) {
  out << "method,reference,C,S,energy_imp,time_imp,missing\n";
  for (const auto& r : rows) {
    out << to_string(r.method) << ',' << to_string(r.reference) << ',' << csv::num(r.C) << ',' << csv::num(r.S)
        << ',' << csv::num(r.energy_imp) << ',' << csv::num(r.time_imp) << ',' << (r.missing ? 1 : 0) << '\n';
  }
}

std::vector<EntryAverage> entry_averages(const std::vector<CellSummary>& cells,
                                         const std::vector<ImprovementRow>& imps, const GridSpec& spec) {
  std::vector<EntryAverage> out;
  if (imps.empty()) return out;
  const Method method = imps.front().method;
  const Method reference = imps.front().reference;
  for (double C : spec.entry_times) {
    EntryAverage a;
    a.C = C;
    a.method = method;
    a.reference = reference;
    int n_cells = 0;
    for (const auto& c : cells) {
      if (c.method != method || c.C != C || c.completed == 0) continue;
      a.energy += c.energy_mean;
      a.travel_time += c.time_mean;
      ++n_cells;
    }
    for (const auto& r : imps) {
      if (r.C != C || r.missing) continue;
      a.energy_imp += r.energy_imp;
      a.time_imp += r.time_imp;
      ++a.cells;
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    a.energy = n_cells > 0 ? a.energy / n_cells : nan;
    a.travel_time = n_cells > 0 ? a.travel_time / n_cells : nan;
    a.energy_imp = a.cells > 0 ? a.energy_imp / a.cells : nan;
    a.time_imp = a.cells > 0 ? a.time_imp / a.cells : nan;
    out.push_back(a);
  }
  return out;
}

void write_entry_csv(std::ostream& out, const std::vector<EntryAverage>& rows) {
  out << "C,method,reference,energy,travel_time,energy_imp,time_imp,cells\n";
  for (const auto& r : rows) {
    out << csv::num(r.C) << ',' << to_string(r.method) << ',' << to_string(r.reference) << ','
        << csv::num(r.energy) << ',' << csv::num(r.travel_time) << ',' << csv::num(r.energy_imp) << ','
        << csv::num(r.time_imp) << ',' << r.cells << '\n';
  }
}

std::vector<std::vector<double>> heatmap(const std::vector<ImprovementRow>& rows, const GridSpec& spec,
                                         bool energy) {
  std::vector<std::vector<double>> m(spec.entry_times.size(),
                                     std::vector<double>(spec.entry_speeds.size(),
                                                         std::numeric_limits<double>::quiet_NaN()));
  for (const auto& r : rows) {
    auto ci = std::find(spec.entry_times.begin(), spec.entry_times.end(), r.C);
    auto si = std::find(spec.entry_speeds.begin(), spec.entry_speeds.end(), r.S);
    if (ci == spec.entry_times.end() || si == spec.entry_speeds.end()) continue;
    m[static_cast<std::size_t>(ci - spec.entry_times.begin())][static_cast<std::size_t>(si - spec.entry_speeds.begin())] =
        energy ? r.energy_imp : r.time_imp;
  }
  return m;
}

void write_heatmap_csv(std::ostream& out, const std::vector<std::vector<double>>& matrix, const GridSpec& spec) {
  out << "entry";
  for (double s : spec.entry_speeds) out << ",S" << cell_label(s);
  out << '\n';
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    out << 'C' << cell_label(spec.entry_times[i]);
    for (double v : matrix[i]) out << ',' << csv::num(v);
    out << '\n';
  }
}

}  // namespace ecodrive::harness
