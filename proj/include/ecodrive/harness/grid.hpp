#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "ecodrive/harness/runner.hpp"

namespace ecodrive::harness {

/// Every (method, C, S, seed) episode of the grid, sorted by row_less.
/// The parallel version distributes episodes over OpenMP threads; the rows are
/// identical to the serial ones.
std::vector<MetricsRow> grid_eval(const AppConfig& config, const GridSpec& spec, const rl::Network* network);
std::vector<MetricsRow> grid_eval_serial(const AppConfig& config, const GridSpec& spec, const rl::Network* network);

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows);
std::vector<MetricsRow> read_metrics_csv(std::istream& in);

/// Seed statistics of one (method, C, S) cell over completed runs.
struct CellSummary {
  Method method = Method::IDM;
  double C = 0.0;
  double S = 0.0;
  int runs = 0;       ///< rows in the cell
  int completed = 0;  ///< rows that reached the end of the road
  double energy_mean = 0.0;
  double energy_std = 0.0;
  double time_mean = 0.0;
  double time_std = 0.0;
  int collisions = 0;
};

std::vector<CellSummary> summarize(const std::vector<MetricsRow>& rows);
void write_summary_csv(std::ostream& out, const std::vector<CellSummary>& cells);

/// (reference - value) / reference in percent.
double improvement(double reference, double value);

struct ImprovementRow {
  Method method = Method::IDM;
  Method reference = Method::IDM;
  double C = 0.0;
  double S = 0.0;
  double energy_imp = 0.0;
  double time_imp = 0.0;
  bool missing = false;  ///< a cell of either method had no completed run
};

/// Per-cell improvement of `method` over `reference` for every (C, S) of the spec.
std::vector<ImprovementRow> improvement_table(const std::vector<CellSummary>& cells, const GridSpec& spec,
                                              Method method, Method reference);
void write_improvement_csv(std::ostream& out, const std::vector<ImprovementRow>& rows);

/// Per entry time: method means over S and the mean of the per-cell improvements.
struct EntryAverage {
  double C = 0.0;
  Method method = Method::IDM;
  Method reference = Method::IDM;
  double energy = 0.0;
  double travel_time = 0.0;
  double energy_imp = 0.0;
  double time_imp = 0.0;
  int cells = 0;  ///< non-missing cells averaged
};

std::vector<EntryAverage> entry_averages(const std::vector<CellSummary>& cells,
                                         const std::vector<ImprovementRow>& imps, const GridSpec& spec);
void write_entry_csv(std::ostream& out, const std::vector<EntryAverage>& rows);

/// entry_times x entry_speeds matrix of one improvement metric; NaN for missing cells.
std::vector<std::vector<double>> heatmap(const std::vector<ImprovementRow>& rows, const GridSpec& spec,
                                         bool energy);
void write_heatmap_csv(std::ostream& out, const std::vector<std::vector<double>>& matrix, const GridSpec& spec);

}  // namespace ecodrive::harness
