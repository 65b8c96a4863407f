#pragma once

// Figure-style sweeps: for a lot size and load, sweep the power ratio M/K and
// tabulate the bounds, the exact chain solve, the fluid value, and a
// simulation estimate per grid point. Emits CSV (fixed header) plus a small
// gnuplot script; rows are written in grid order and all randomness derives
// from one master seed, so output files are byte-stable for fixed inputs.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "evlot/des.hpp"
#include "evlot/exact.hpp"
#include "evlot/fluid.hpp"
#include "evlot/model.hpp"
#include "evlot/rng.hpp"

namespace evlot {

struct FigureRow {
  double m_over_k = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double exact = 0.0;
  double fluid = 0.0;
  double sim_mean = 0.0;
  double sim_ci = 0.0;  // CI half-width of the simulation estimate
};

struct FigureConfig {
  int spaces = 10;
  double load = 0.8;  // lambda / (mu K)
  double parking_rate = 1.0;
  double charging_rate = 1.0;
  std::vector<double> grid;  // M/K values; empty = default 0.05..1.00
  SimConfig sim;             // sim column settings; master_seed feeds every point
};

/// The default power-ratio grid 0.05, 0.10, ..., 1.00.
inline std::vector<double> default_mk_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 20; ++i) grid.push_back(i / 20.0);
  return grid;
}

inline constexpr char kFigureCsvHeader[] = "m_over_k,lower,upper,exact,fluid,sim_mean,sim_ci";

/// Computes one panel. The simulation column uses the departure-count success
/// estimator; each grid point gets its own derived seed.
inline std::vector<FigureRow> figure_panel(const FigureConfig& cfg) {
  if (cfg.spaces < 1) throw InvalidParams("figure_panel: spaces must be >= 1");
  if (!(cfg.load > 0.0)) throw InvalidParams("figure_panel: load must be > 0");
  const std::vector<double> grid = cfg.grid.empty() ? default_mk_grid() : cfg.grid;

  std::vector<FigureRow> rows;
  rows.reserve(grid.size());
  const std::uint64_t panel_key =
      static_cast<std::uint64_t>(cfg.spaces) * 1009u + std::llround(cfg.load * 100.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double mk = grid[i];
    if (!(mk > 0.0 && mk <= 1.0)) throw InvalidParams("figure_panel: M/K values must be in (0,1]");
    ModelParams p;
    p.spaces = cfg.spaces;
    p.parking_rate = cfg.parking_rate;
    p.charging_rate = cfg.charging_rate;
    p.arrival_rate = cfg.load * cfg.parking_rate * cfg.spaces;
    p.power_cap = mk * cfg.spaces;

    FigureRow row;
    row.m_over_k = mk;
    row.lower = lower_bound(p);
    row.upper = upper_bound(p);
    row.exact = metrics(stationary_distribution(p)).success;
    row.fluid = fluid_success(p);

    SimConfig sim = cfg.sim;
    sim.master_seed = derive_seed(cfg.sim.master_seed, panel_key, i);
    const SimEstimates est = simulate_markovian(p, sim);
    row.sim_mean = est.success_departures.value;
    row.sim_ci = est.success_departures.half_width;
    rows.push_back(row);
  }
  return rows;
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline void write_figure_csv(const std::string& path, const std::vector<FigureRow>& rows) {
  std::ofstream out(path);
  if (!out) throw NumericalError("write_figure_csv: cannot open " + path);
  out << kFigureCsvHeader << "\n";
  for (const FigureRow& r : rows) {
    out << format_double(r.m_over_k) << ',' << format_double(r.lower) << ','
        << format_double(r.upper) << ',' << format_double(r.exact) << ','
        << format_double(r.fluid) << ',' << format_double(r.sim_mean) << ','
        << format_double(r.sim_ci) << "\n";
  }
}

/// Companion gnuplot script referencing the CSV; the toolkit itself renders
/// nothing.
inline std::string figure_plot_script(const std::string& csv_path, const std::string& title) {
  std::string s;
  s += "set datafile separator ','\n";
  s += "set key bottom right\n";
  s += "set xlabel 'M/K'\n";
  s += "set ylabel 'success probability'\n";
  s += "set yrange [0:1]\n";
  s += "set title '" + title + "'\n";
  s += "plot '" + csv_path + "' using 1:2 skip 1 with lines title 'lower bound', \\\n";
  s += "     '" + csv_path + "' using 1:3 skip 1 with lines title 'upper bound', \\\n";
  s += "     '" + csv_path + "' using 1:4 skip 1 with lines title 'exact', \\\n";
  s += "     '" + csv_path + "' using 1:5 skip 1 with lines title 'fluid', \\\n";
  s += "     '" + csv_path + "' using 1:6:7 skip 1 with yerrorbars title 'simulation'\n";
  return s;
}

/// File name used by the all-panels sweep: figure_K<k>_load<100*load>.csv.
inline std::string panel_csv_name(int spaces, double load) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "figure_K%d_load%03d.csv", spaces,
                static_cast<int>(std::llround(load * 100.0)));
  return buf;
}

}  // namespace evlot
