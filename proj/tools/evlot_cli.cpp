// Command-line front end: single computations (exact / bounds / fluid /
// diffusion / simulate) and the figure sweep. Every subcommand accepts
// --config <file> with flat `key=value` lines mirroring the flag names;
// explicit flags override file values. Exit codes: 0 success, 1 usage error,
// 2 numerical failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "evlot/des.hpp"
#include "evlot/diffusion.hpp"
#include "evlot/exact.hpp"
#include "evlot/experiments.hpp"
#include "evlot/fluid.hpp"
#include "evlot/model.hpp"

namespace {

using evlot::DistributionSpec;
using ordered_json = nlohmann::ordered_json;

struct ModelFlags {
  double lambda = 1.0;
  double mu = 1.0;
  double nu = 1.0;
  int spaces = 1;
  double power_cap = 1.0;

  evlot::ModelParams params() const { return {lambda, mu, nu, spaces, power_cap}; }
};

void add_model_flags(CLI::App* cmd, ModelFlags& f) {
  cmd->add_option("--lambda", f.lambda, "arrival rate");
  cmd->add_option("--mu", f.mu, "parking-time rate");
  cmd->add_option("--nu", f.nu, "charging-time rate");
  cmd->add_option("-K,--spaces", f.spaces, "parking spaces");
  cmd->add_option("-M,--power-cap", f.power_cap, "full-power charging capacity");
}

struct SimFlags {
  double horizon = 2000.0;
  int replications = 5;
  double warmup = 0.1;
  int batches = 0;
  double confidence = 0.95;
  std::string mode = "horizon";
  std::int64_t departures = 200'000;

  evlot::SimConfig config(std::uint64_t seed) const {
    evlot::SimConfig cfg;
    cfg.horizon = horizon;
    cfg.replications = replications;
    cfg.warmup_fraction = warmup;
    cfg.batch_count = batches;
    cfg.confidence = confidence;
    cfg.master_seed = seed;
    cfg.target_departures = departures;
    if (mode == "horizon")
      cfg.mode = evlot::SimConfig::Mode::fixed_horizon;
    else if (mode == "departures")
      cfg.mode = evlot::SimConfig::Mode::fixed_departures;
    else
      throw evlot::InvalidParams("mode must be 'horizon' or 'departures'");
    return cfg;
  }
};

void add_sim_flags(CLI::App* cmd, SimFlags& f) {
  cmd->add_option("--horizon", f.horizon, "simulated time per replication");
  cmd->add_option("--reps", f.replications, "independent replications");
  cmd->add_option("--warmup", f.warmup, "warmup fraction discarded");
  cmd->add_option("--batches", f.batches, "batch-means batches (single run)");
  cmd->add_option("--confidence", f.confidence, "confidence level for intervals");
  cmd->add_option("--mode", f.mode, "run length mode: horizon|departures");
  cmd->add_option("--departures", f.departures, "departure count for --mode departures");
}

/// Parses "exp:<rate>" or "det:<value>" into a distribution spec.
DistributionSpec parse_dist(const std::string& text) {
  const auto colon = text.find(':');
  if (colon != std::string::npos) {
    const std::string kind = text.substr(0, colon);
    const double x = std::stod(text.substr(colon + 1));
    if (kind == "exp") return DistributionSpec::exponential(x);
    if (kind == "det") return DistributionSpec::deterministic(x);
  }
  throw evlot::InvalidParams("distribution must be exp:<rate> or det:<value>, got '" + text + "'");
}

std::string fmt(double v) { return evlot::format_double(v); }

/// Renders one flat record. text: aligned key = value lines; csv: header plus
/// one row; json-lines: a single JSON object.
void emit_record(const ordered_json& record, const std::string& format, std::ostream& os) {
  if (format == "json-lines") {
    os << record.dump() << "\n";
    return;
  }
  if (format == "csv") {
    std::string header, row;
    for (auto it = record.begin(); it != record.end(); ++it) {
      if (!header.empty()) {
        header += ',';
        row += ',';
      }
      header += it.key();
      if (it->is_number_float())
        row += fmt(it->get<double>());
      else if (it->is_string())
        row += it->get<std::string>();
      else
        row += it->dump();
    }
    os << header << "\n" << row << "\n";
    return;
  }
  for (auto it = record.begin(); it != record.end(); ++it) {
    std::string value;
    if (it->is_number_float())
      value = fmt(it->get<double>());
    else if (it->is_string())
      value = it->get<std::string>();
    else
      value = it->dump();
    os << it.key() << " = " << value << "\n";
  }
}

void write_output(const ordered_json& record, const std::string& format,
                  const std::string& out_path) {
  if (out_path.empty()) {
    emit_record(record, format, std::cout);
  } else {
    std::ofstream os(out_path);
    if (!os) throw evlot::NumericalError("cannot open output file " + out_path);
    emit_record(record, format, os);
  }
}

void put_estimate(ordered_json& rec, const std::string& name, const evlot::EstimateWithCI& e) {
  rec[name] = e.value;
  rec[name + "_ci"] = e.half_width;
}

// --------------------------------------------------------------------------
// Config file: flat key=value lines mirroring flag names. The file is applied
// by synthesizing tokens ahead of the user's own flags; all options take the
// last value, so explicit flags win.
// --------------------------------------------------------------------------

std::vector<std::string> config_tokens(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::FileError("config file not found: " + path);
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) continue;
    tokens.push_back((key.size() == 1 ? "-" : "--") + key);
    tokens.push_back(value);
  }
  return tokens;
}

// --------------------------------------------------------------------------
// Subcommand bodies
// --------------------------------------------------------------------------

struct CommonOut {
  std::string format = "text";
  std::string out;
  std::uint64_t seed = 20260809ull;
  std::string config;  // consumed by the pre-scan; registered so parsing accepts it
};

void add_common_flags(CLI::App* cmd, CommonOut& c) {
  cmd->add_option("--format", c.format, "output format: text|csv|json-lines")
      ->check(CLI::IsMember({"text", "csv", "json-lines"}));
  cmd->add_option("--out", c.out, "write the result record to this file");
  cmd->add_option("--seed", c.seed, "master seed for any simulation involved");
  cmd->add_option("--config", c.config, "flat key=value config file (flags override)");
}

ordered_json model_record(const evlot::ModelParams& p) {
  ordered_json rec;
  rec["lambda"] = p.arrival_rate;
  rec["mu"] = p.parking_rate;
  rec["nu"] = p.charging_rate;
  rec["K"] = p.spaces;
  rec["M"] = p.power_cap;
  return rec;
}

int run_exact(const ModelFlags& mf, const CommonOut& out) {
  const evlot::ModelParams p = mf.params();
  const evlot::PerformanceMetrics m = evlot::metrics(evlot::stationary_distribution(p));
  ordered_json rec = model_record(p);
  rec["e_u"] = m.mean_uncharged;
  rec["e_q"] = m.mean_total;
  rec["e_c"] = m.mean_charged;
  rec["p_block"] = m.p_block;
  rec["success"] = m.success;
  write_output(rec, out.format, out.out);
  return 0;
}

int run_bounds(const ModelFlags& mf, const CommonOut& out) {
  const evlot::ModelParams p = mf.params();
  const evlot::BoundsResult b = evlot::bounds(p);
  ordered_json rec = model_record(p);
  rec["lower"] = b.lower;
  rec["upper"] = b.upper;
  write_output(rec, out.format, out.out);
  return 0;
}

int run_fluid(const ModelFlags& mf, const CommonOut& out, const std::string& prefactor,
              const std::string& parking, const std::string& charging) {
  const evlot::ModelParams p = mf.params();
  evlot::FluidSolution sol;
  if (!parking.empty() || !charging.empty()) {
    const DistributionSpec b =
        parking.empty() ? DistributionSpec::exponential(p.parking_rate) : parse_dist(parking);
    const DistributionSpec d =
        charging.empty() ? DistributionSpec::exponential(p.charging_rate) : parse_dist(charging);
    if (prefactor == "raw")
      throw evlot::InvalidParams("--prefactor raw is available for exponential laws only");
    sol = evlot::general_fluid_fixed_point(p.arrival_rate, p.spaces, p.power_cap, b, d);
  } else if (prefactor == "raw") {
    sol = evlot::fluid_fixed_point_raw(p);
  } else {
    sol = evlot::fluid_fixed_point(p);
  }
  ordered_json rec = model_record(p);
  rec["u_star"] = sol.u_star;
  rec["regime"] = evlot::to_string(sol.regime);
  rec["p_block"] = sol.p_block;
  rec["p_s"] = sol.p_s;
  write_output(rec, out.format, out.out);
  return 0;
}

int run_simulate(const ModelFlags& mf, const SimFlags& sf, const CommonOut& out,
                 const std::string& parking, const std::string& charging) {
  const evlot::ModelParams p = mf.params();
  const evlot::SimConfig cfg = sf.config(out.seed);
  evlot::SimEstimates est;
  std::string engine = "markovian";
  if (!parking.empty() || !charging.empty()) {
    const DistributionSpec b =
        parking.empty() ? DistributionSpec::exponential(p.parking_rate) : parse_dist(parking);
    const DistributionSpec d =
        charging.empty() ? DistributionSpec::exponential(p.charging_rate) : parse_dist(charging);
    est = evlot::simulate_general(p.arrival_rate, p.spaces, p.power_cap, b, d, cfg);
    engine = "general";
  } else {
    est = evlot::simulate_markovian(p, cfg);
  }
  ordered_json rec = model_record(p);
  rec["engine"] = engine;
  put_estimate(rec, "e_u", est.mean_uncharged);
  put_estimate(rec, "e_q", est.mean_total);
  put_estimate(rec, "e_c", est.mean_charged);
  put_estimate(rec, "p_block", est.p_block);
  put_estimate(rec, "success_departures", est.success_departures);
  put_estimate(rec, "success_time_avg", est.success_time_avg);
  rec["arrivals"] = est.counts.arrivals;
  rec["blocked"] = est.counts.blocked;
  rec["admitted"] = est.counts.admitted;
  rec["departed_charged"] = est.counts.departed_charged;
  rec["departed_uncharged"] = est.counts.departed_uncharged;
  rec["ci_method"] = est.success_departures.method;
  rec["confidence"] = est.success_departures.confidence;
  rec["seed"] = out.seed;
  write_output(rec, out.format, out.out);
  return 0;
}

struct DiffusionFlags {
  double beta = 0.0;
  double kappa = std::numeric_limits<double>::infinity();
  double nu = 1.0;
  double mu = 1.0;
  int n = 100;
  double dt = 1e-3;
  double horizon = 1e4;
};

int run_diffusion(const DiffusionFlags& df, const CommonOut& out) {
  evlot::DiffusionSpec spec{df.beta, df.kappa, df.nu, df.mu};
  evlot::validate(spec);
  ordered_json rec;
  rec["beta"] = spec.beta;
  rec["kappa"] = std::isfinite(spec.kappa) ? ordered_json(spec.kappa) : ordered_json("inf");
  rec["nu"] = spec.nu;
  rec["mu"] = spec.mu;
  rec["n"] = df.n;

  const evlot::ScalingRegime regime{df.n, spec};
  if (std::isfinite(spec.kappa)) {
    const evlot::ModelParams pre = evlot::scaled_params(regime);
    rec["lambda_n"] = pre.arrival_rate;
    rec["M_n"] = pre.power_cap;
    rec["K_n"] = pre.spaces;
  }

  evlot::SdeOptions opts;
  opts.dt = df.dt;
  opts.horizon = df.horizon;
  opts.seed = out.seed;
  const evlot::SdeMoments sde = evlot::sde_stationary_moments(spec, opts);
  rec["sde_mean_u"] = sde.mean_x;
  rec["sde_mean_q"] = sde.mean_y;
  rec["sde_var_u"] = sde.var_x;
  rec["sde_var_q"] = sde.var_y;
  rec["sde_cov_uq"] = sde.cov_xy;

  double mean_u = sde.mean_x, mean_q = sde.mean_y;
  if (!std::isfinite(spec.kappa)) {
    const evlot::PiecewiseGaussianDensity phi = evlot::invariant_density(spec);
    const evlot::SdeMoments dm = phi.moments();
    rec["c1"] = phi.c1();
    rec["c2"] = phi.c2();
    rec["phi_mean_u"] = dm.mean_x;
    rec["phi_mean_q"] = dm.mean_y;
    rec["phi_var_u"] = dm.var_x;
    rec["phi_var_q"] = dm.var_y;
    rec["phi_cov_uq"] = dm.cov_xy;
    mean_u = dm.mean_x;
    mean_q = dm.mean_y;
  }
  const evlot::DiffusionSuccess s = evlot::diffusion_success_estimate(regime, mean_u, mean_q);
  rec["success_estimate"] = s.value;
  rec["regime_warning"] = s.regime_warning;
  rec["seed"] = out.seed;
  write_output(rec, out.format, out.out);
  return 0;
}

struct FigureFlags {
  int spaces = 10;
  double load = 0.8;
  double mu = 1.0;
  double nu = 1.0;
  double grid_step = 0.05;
  bool all = false;
  std::string out_dir = ".";
};

int run_figure(const FigureFlags& ff, const SimFlags& sf, const CommonOut& out) {
  if (!(ff.grid_step > 0.0 && ff.grid_step <= 1.0))
    throw evlot::InvalidParams("figure: grid step must lie in (0,1]");
  std::vector<double> grid;
  const int steps = static_cast<int>(std::llround(1.0 / ff.grid_step));
  for (int i = 1; i <= steps; ++i) grid.push_back(static_cast<double>(i) / steps);

  struct Panel {
    int spaces;
    double load;
    std::string csv;
  };
  std::vector<Panel> panels;
  if (ff.all) {
    for (int k : {10, 50})
      for (double load : {0.8, 1.0, 1.2})
        panels.push_back(
            {k, load, (std::filesystem::path(ff.out_dir) / evlot::panel_csv_name(k, load)).string()});
  } else {
    std::string csv = out.out;
    if (csv.empty())
      csv = (std::filesystem::path(ff.out_dir) / evlot::panel_csv_name(ff.spaces, ff.load)).string();
    panels.push_back({ff.spaces, ff.load, csv});
  }

  for (const Panel& panel : panels) {
    evlot::FigureConfig cfg;
    cfg.spaces = panel.spaces;
    cfg.load = panel.load;
    cfg.parking_rate = ff.mu;
    cfg.charging_rate = ff.nu;
    cfg.grid = grid;
    cfg.sim = sf.config(out.seed);
    const std::vector<evlot::FigureRow> rows = evlot::figure_panel(cfg);
    evlot::write_figure_csv(panel.csv, rows);
    char title[96];
    std::snprintf(title, sizeof title, "K=%d, lambda=%.2gK", panel.spaces, panel.load);
    const std::string script = evlot::figure_plot_script(panel.csv, title);
    std::ofstream gp(panel.csv + ".gp");
    gp << script;
    std::cout << "wrote " << panel.csv << " and " << panel.csv << ".gp\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Charging-lot performance toolkit: exact chain analysis, bounds,\n"
               "fluid and diffusion approximations, and discrete-event simulation."};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  ModelFlags mf;
  SimFlags sf;
  CommonOut out;
  DiffusionFlags df;
  FigureFlags ff;
  std::string prefactor = "blocking";
  std::string parking_dist, charging_dist;

  CLI::App* exact = app.add_subcommand("exact", "stationary chain solve and metrics");
  add_model_flags(exact, mf);
  add_common_flags(exact, out);

  CLI::App* bounds = app.add_subcommand("bounds", "lower/upper success bounds");
  add_model_flags(bounds, mf);
  add_common_flags(bounds, out);

  CLI::App* fluid = app.add_subcommand("fluid", "fluid fixed point and success probability");
  add_model_flags(fluid, mf);
  add_common_flags(fluid, out);
  fluid->add_option("--prefactor", prefactor, "fixed-point prefactor: blocking|raw")
      ->check(CLI::IsMember({"blocking", "raw"}));
  fluid->add_option("--parking", parking_dist, "parking law exp:<rate>|det:<value>");
  fluid->add_option("--charging", charging_dist, "charging law exp:<rate>|det:<value>");

  CLI::App* simulate = app.add_subcommand("simulate", "discrete-event simulation");
  add_model_flags(simulate, mf);
  add_sim_flags(simulate, sf);
  add_common_flags(simulate, out);
  simulate->add_option("--parking", parking_dist, "parking law exp:<rate>|det:<value>");
  simulate->add_option("--charging", charging_dist, "charging law exp:<rate>|det:<value>");

  CLI::App* diffusion = app.add_subcommand("diffusion", "square-root-staffing diffusion limit");
  add_common_flags(diffusion, out);
  diffusion->add_option("--beta", df.beta, "power second-order term");
  diffusion->add_option("--kappa", df.kappa, "space second-order term (omit for +inf)");
  diffusion->add_option("--nu", df.nu, "charging rate");
  diffusion->add_option("--mu", df.mu, "parking rate");
  diffusion->add_option("-n,--index", df.n, "scaling index of the pre-limit system");
  diffusion->add_option("--dt", df.dt, "Euler step");
  diffusion->add_option("--sde-horizon", df.horizon, "SDE horizon");

  CLI::App* figure = app.add_subcommand("figure", "success-vs-M/K sweep panels (CSV + gnuplot)");
  add_sim_flags(figure, sf);
  add_common_flags(figure, out);
  figure->add_option("-K,--spaces", ff.spaces, "parking spaces of the panel");
  figure->add_option("--load", ff.load, "offered load lambda/(mu K)");
  figure->add_option("--mu", ff.mu, "parking rate");
  figure->add_option("--nu", ff.nu, "charging rate");
  figure->add_option("--grid-step", ff.grid_step, "M/K grid step");
  figure->add_flag("--all", ff.all, "emit the six standard panels");
  figure->add_option("--out-dir", ff.out_dir, "directory for panel files");

  // Apply any --config file by splicing its tokens ahead of the user's flags.
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    std::string config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "--config" && i + 1 < args.size())
        config_path = args[i + 1];
      else if (args[i].rfind("--config=", 0) == 0)
        config_path = args[i].substr(9);
    }
    if (!config_path.empty() && !args.empty()) {
      const std::vector<std::string> extra = config_tokens(config_path);
      args.insert(args.begin() + 1, extra.begin(), extra.end());
    }

    std::vector<const char*> cargv{argv[0]};
    for (const std::string& a : args) cargv.push_back(a.c_str());
    app.parse(static_cast<int>(cargv.size()), cargv.data());

    if (exact->parsed()) return run_exact(mf, out);
    if (bounds->parsed()) return run_bounds(mf, out);
    if (fluid->parsed()) return run_fluid(mf, out, prefactor, parking_dist, charging_dist);
    if (simulate->parsed()) return run_simulate(mf, sf, out, parking_dist, charging_dist);
    if (diffusion->parsed()) return run_diffusion(df, out);
    if (figure->parsed()) return run_figure(ff, sf, out);
    return 1;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const evlot::InvalidParams& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  }
}
