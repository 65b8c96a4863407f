#pragma once

// Discrete-event simulation of the lot. Two engines share the bookkeeping:
// a continuous-time jump simulation of the (uncharged, total) chain for the
// Markovian model, and an event-driven simulator for general parking and
// charging laws where all uncharged cars share the power budget equally.
// The general engine tracks a cumulative per-car effort clock S(t): a car
// admitted at effort level S with requirement d completes exactly when S(t)
// reaches S + d, so the next completion is the minimum of an ordered set of
// completion efforts and each event costs O(log n).
//
// Replications draw from counter-based streams keyed by (master_seed, index)
// and are reduced in index order, so results are bitwise reproducible.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "evlot/diffusion.hpp"
#include "evlot/errors.hpp"
#include "evlot/fluid.hpp"
#include "evlot/model.hpp"
#include "evlot/rng.hpp"
#include "evlot/stats.hpp"

namespace evlot {

struct SimConfig {
  enum class Mode { fixed_horizon, fixed_departures };
  Mode mode = Mode::fixed_horizon;
  double horizon = 2000.0;                 // run length in time units
  std::int64_t target_departures = 200'000;  // run length for fixed_departures
  double warmup_fraction = 0.1;            // of the horizon / departure target
  int replications = 5;
  std::uint64_t master_seed = 1;
  int batch_count = 0;   // > 0: single-run batch means instead of replications
  double confidence = 0.95;
  bool collect_records = false;  // general engine only, first replication
  std::int64_t max_records = 100'000;
};

/// Life record of one EV in the general simulator.
struct EVRecord {
  enum class Status { charging, charged, departed_charged, departed_uncharged, blocked };
  double arrival_time = 0.0;
  double parking_duration = 0.0;   // drawn from B (zero for blocked)
  double charge_requirement = 0.0; // drawn from D (zero for blocked)
  double attained_work = 0.0;
  Status status = Status::charging;
};

inline const char* to_string(EVRecord::Status s) {
  switch (s) {
    case EVRecord::Status::charging: return "charging";
    case EVRecord::Status::charged: return "charged";
    case EVRecord::Status::departed_charged: return "departed-charged";
    case EVRecord::Status::departed_uncharged: return "departed-uncharged";
    case EVRecord::Status::blocked: return "blocked";
  }
  return "?";
}

/// Aggregated counts over all replications (post-warmup events).
struct SimCounts {
  std::int64_t arrivals = 0;
  std::int64_t blocked = 0;
  std::int64_t admitted = 0;
  std::int64_t departed_charged = 0;
  std::int64_t departed_uncharged = 0;
  std::int64_t in_system_at_end = 0;
};

struct SimEstimates {
  EstimateWithCI mean_uncharged;
  EstimateWithCI mean_total;
  EstimateWithCI mean_charged;
  EstimateWithCI p_block;             // blocked / arrivals
  EstimateWithCI success_departures;  // departed charged / departed total
  EstimateWithCI success_time_avg;    // time-average E[C] / E[Q]
  SimCounts counts;
  std::vector<EVRecord> records;  // only when SimConfig::collect_records
};

namespace detail {

/// Post-warmup accumulators for one replication (or one batch-means slot).
struct RepStats {
  double span = 0.0;
  double int_u = 0.0, int_q = 0.0;
  double int_uu = 0.0, int_qq = 0.0, int_uq = 0.0;
  std::int64_t arrivals = 0, blocked = 0, admitted = 0;
  std::int64_t dep_charged = 0, dep_uncharged = 0;
  std::int64_t in_system_at_end = 0;

  double mean_u() const { return int_u / span; }
  double mean_q() const { return int_q / span; }
  double var_u() const { return int_uu / span - mean_u() * mean_u(); }
  double var_q() const { return int_qq / span - mean_q() * mean_q(); }
  double cov_uq() const { return int_uq / span - mean_u() * mean_q(); }
};

inline void check_sim_config(const SimConfig& cfg) {
  if (!(cfg.warmup_fraction >= 0.0 && cfg.warmup_fraction < 1.0))
    throw InvalidParams("SimConfig: warmup_fraction must lie in [0,1)");
  if (cfg.replications < 1) throw InvalidParams("SimConfig: replications must be >= 1");
  if (cfg.mode == SimConfig::Mode::fixed_horizon && !(cfg.horizon > 0.0))
    throw InvalidParams("SimConfig: horizon must be > 0");
  if (cfg.mode == SimConfig::Mode::fixed_departures && cfg.target_departures < 1)
    throw InvalidParams("SimConfig: target_departures must be >= 1");
  if (cfg.batch_count > 0) {
    if (cfg.replications != 1)
      throw InvalidParams("SimConfig: batch means require replications = 1");
    if (cfg.mode != SimConfig::Mode::fixed_horizon)
      throw InvalidParams("SimConfig: batch means require fixed-horizon mode");
    if (cfg.batch_count < 2) throw InvalidParams("SimConfig: need at least 2 batches");
  }
}

/// Time-integral bookkeeping shared by both engines, including the split of
/// integrals across batch-means windows.
class Bookkeeper {
 public:
  Bookkeeper(const SimConfig& cfg, std::vector<RepStats>& slots)
      : cfg_(cfg), slots_(slots) {
    if (cfg.mode == SimConfig::Mode::fixed_horizon) {
      stats_from_ = cfg.warmup_fraction * cfg.horizon;
      slot_width_ = (cfg.horizon - stats_from_) / std::max(1, cfg.batch_count);
    } else {
      stats_from_ = std::numeric_limits<double>::infinity();  // set by departures
      slot_width_ = std::numeric_limits<double>::infinity();
    }
  }

  bool counting(double t) const { return t >= stats_from_; }

  void activate_now(double t) { stats_from_ = t; }

  RepStats& slot_at(double t) { return slots_[slot_index(t)]; }

  void integrate(double from, double to, int u, int q) {
    from = std::max(from, stats_from_);
    if (to <= from) return;
    while (from < to) {
      const std::size_t s = slot_index(from);
      double seg_end = to;
      if (cfg_.batch_count > 1)
        seg_end = std::min(to, stats_from_ + (s + 1) * slot_width_);
      const double w = seg_end - from;
      RepStats& st = slots_[s];
      st.span += w;
      st.int_u += w * u;
      st.int_q += w * q;
      st.int_uu += w * static_cast<double>(u) * u;
      st.int_qq += w * static_cast<double>(q) * q;
      st.int_uq += w * static_cast<double>(u) * q;
      if (seg_end <= from) break;  // degenerate slot, avoid spinning
      from = seg_end;
    }
  }

 private:
  std::size_t slot_index(double t) const {
    if (cfg_.batch_count <= 1) return 0;
    const auto idx = static_cast<std::int64_t>((t - stats_from_) / slot_width_);
    return static_cast<std::size_t>(std::clamp<std::int64_t>(idx, 0, cfg_.batch_count - 1));
  }

  const SimConfig& cfg_;
  std::vector<RepStats>& slots_;
  double stats_from_ = 0.0;
  double slot_width_ = 0.0;
};

/// One replication of the Markovian jump simulation. Blocked arrivals are
/// kept as explicit events (rate lambda regardless of occupancy) so the
/// blocked fraction estimates P(Q=K) by PASTA.
inline void run_markovian_rep(const ModelParams& p, const SimConfig& cfg,
                              std::uint64_t stream_id, std::vector<RepStats>& slots) {
  RngStream rng(cfg.master_seed, stream_id);
  Bookkeeper book(cfg, slots);
  const std::int64_t warmup_deps =
      cfg.mode == SimConfig::Mode::fixed_departures
          ? static_cast<std::int64_t>(cfg.warmup_fraction * cfg.target_departures)
          : 0;
  std::int64_t departures_seen = 0;
  if (cfg.mode == SimConfig::Mode::fixed_departures && warmup_deps == 0) book.activate_now(0.0);

  double t = 0.0;
  int u = 0, q = 0;
  while (true) {
    const double rate_arrival = p.arrival_rate;
    const double rate_dep_uncharged = p.parking_rate * u;
    const double rate_dep_charged = p.parking_rate * (q - u);
    const double rate_completion = p.charging_rate * power(u, p.power_cap);
    const double total =
        rate_arrival + rate_dep_uncharged + rate_dep_charged + rate_completion;
    const double t_next = t + rng.exponential(total);
    if (cfg.mode == SimConfig::Mode::fixed_horizon && t_next >= cfg.horizon) {
      book.integrate(t, cfg.horizon, u, q);
      break;
    }
    book.integrate(t, t_next, u, q);
    t = t_next;
    const bool counting = book.counting(t);
    RepStats& st = book.slot_at(t);

    double v = rng.u01() * total;
    if (v < rate_arrival) {
      if (counting) ++st.arrivals;
      if (q < p.spaces) {
        ++u;
        ++q;
        if (counting) ++st.admitted;
      } else if (counting) {
        ++st.blocked;
      }
    } else if ((v -= rate_arrival) < rate_dep_uncharged) {
      --u;
      --q;
      ++departures_seen;
      if (counting) ++st.dep_uncharged;
    } else if ((v -= rate_dep_uncharged) < rate_dep_charged) {
      --q;
      ++departures_seen;
      if (counting) ++st.dep_charged;
    } else {
      --u;
    }

    if (cfg.mode == SimConfig::Mode::fixed_departures) {
      if (!book.counting(t) && departures_seen >= warmup_deps) book.activate_now(t);
      if (departures_seen >= cfg.target_departures) break;
    }
  }
  slots.back().in_system_at_end += q;
}

inline EstimateWithCI ci_over_units(const std::vector<RepStats>& units, double confidence,
                                    const std::string& method,
                                    const std::function<double(const RepStats&)>& f) {
  std::vector<double> values;
  values.reserve(units.size());
  for (const RepStats& u : units) values.push_back(f(u));
  return mean_confidence_interval(values, confidence, method);
}

inline SimEstimates aggregate(const std::vector<RepStats>& units, const SimConfig& cfg) {
  SimCounts counts;
  for (const RepStats& u : units) {
    counts.arrivals += u.arrivals;
    counts.blocked += u.blocked;
    counts.admitted += u.admitted;
    counts.departed_charged += u.dep_charged;
    counts.departed_uncharged += u.dep_uncharged;
    counts.in_system_at_end += u.in_system_at_end;
  }
  if (counts.arrivals == 0)
    throw NumericalError("simulation observed no arrivals after warmup (degenerate config)");
  if (counts.departed_charged + counts.departed_uncharged == 0)
    throw NumericalError("simulation observed no departures after warmup (degenerate config)");
  for (const RepStats& u : units)
    if (!(u.span > 0.0) || u.int_q <= 0.0)
      throw NumericalError("simulation slot with empty occupancy; lengthen the run");

  const std::string method = cfg.batch_count > 0 ? "batch-means" : "replications";
  SimEstimates out;
  out.counts = counts;
  out.mean_uncharged = ci_over_units(units, cfg.confidence, method,
                                     [](const RepStats& u) { return u.mean_u(); });
  out.mean_total = ci_over_units(units, cfg.confidence, method,
                                 [](const RepStats& u) { return u.mean_q(); });
  out.mean_charged = ci_over_units(units, cfg.confidence, method, [](const RepStats& u) {
    return (u.int_q - u.int_u) / u.span;
  });
  out.p_block = ci_over_units(units, cfg.confidence, method, [](const RepStats& u) {
    return u.arrivals > 0 ? static_cast<double>(u.blocked) / u.arrivals : 0.0;
  });
  out.success_departures = ci_over_units(units, cfg.confidence, method, [](const RepStats& u) {
    const std::int64_t total = u.dep_charged + u.dep_uncharged;
    return total > 0 ? static_cast<double>(u.dep_charged) / total : 0.0;
  });
  out.success_time_avg = ci_over_units(units, cfg.confidence, method, [](const RepStats& u) {
    return (u.int_q - u.int_u) / u.int_q;
  });
  return out;
}

}  // namespace detail

/// Jump simulation of the Markovian lot. Reports time-average occupancy
/// metrics, the blocked-arrival fraction, and both success estimators (the
/// fraction of departures that leave charged, and time-average E[C]/E[Q]).
inline SimEstimates simulate_markovian(const ModelParams& p, const SimConfig& cfg) {
  validate(p);
  detail::check_sim_config(cfg);
  const int units = cfg.batch_count > 0 ? cfg.batch_count : cfg.replications;
  std::vector<detail::RepStats> slots(units);
  if (cfg.batch_count > 0) {
    detail::run_markovian_rep(p, cfg, 0, slots);
  } else {
    for (int rep = 0; rep < cfg.replications; ++rep) {
      std::vector<detail::RepStats> one(1);
      detail::run_markovian_rep(p, cfg, static_cast<std::uint64_t>(rep), one);
      slots[rep] = one[0];
    }
  }
  return detail::aggregate(slots, cfg);
}

/// Event-driven simulation with general independent parking law B and
/// charging requirement law D. Uncharged cars charge at rate min{1, M/U};
/// simultaneous events resolve with priority departure > completion > arrival.
inline SimEstimates simulate_general(double arrival_rate, int spaces, double power_cap,
                                     const DistributionSpec& parking,
                                     const DistributionSpec& charging, const SimConfig& cfg) {
  if (!(arrival_rate > 0.0)) throw InvalidParams("simulate_general: arrival_rate must be > 0");
  if (spaces < 1) throw InvalidParams("simulate_general: spaces must be >= 1");
  if (!(power_cap > 0.0) || power_cap > static_cast<double>(spaces))
    throw InvalidParams("simulate_general: power_cap must lie in (0, spaces]");
  detail::check_sim_config(cfg);

  const int units = cfg.batch_count > 0 ? cfg.batch_count : cfg.replications;
  std::vector<detail::RepStats> slots(units);
  std::vector<EVRecord> records;

  struct Car {
    double requirement = 0.0;
    double effort_start = 0.0;
    bool charged = false;
    std::int64_t record = -1;
  };

  const int reps = cfg.batch_count > 0 ? 1 : cfg.replications;
  for (int rep = 0; rep < reps; ++rep) {
    std::vector<detail::RepStats> local(cfg.batch_count > 0 ? cfg.batch_count : 1);
    RngStream rng(cfg.master_seed, static_cast<std::uint64_t>(rep));
    detail::Bookkeeper book(cfg, local);
    const std::int64_t warmup_deps =
        cfg.mode == SimConfig::Mode::fixed_departures
            ? static_cast<std::int64_t>(cfg.warmup_fraction * cfg.target_departures)
            : 0;
    if (cfg.mode == SimConfig::Mode::fixed_departures && warmup_deps == 0) book.activate_now(0.0);
    std::int64_t departures_seen = 0;

    double t = 0.0;
    double effort = 0.0;  // S(t), cumulative per-car charging effort
    double next_arrival = rng.exponential(arrival_rate);
    std::priority_queue<std::pair<double, std::int64_t>,
                        std::vector<std::pair<double, std::int64_t>>,
                        std::greater<>> departures;
    std::set<std::pair<double, std::int64_t>> completions;  // (effort target, id)
    std::unordered_map<std::int64_t, Car> cars;
    std::int64_t next_id = 0;
    const bool recording = cfg.collect_records && rep == 0;

    enum class Ev { departure = 0, completion = 1, arrival = 2 };
    while (true) {
      const int u = static_cast<int>(completions.size());
      const int q = static_cast<int>(cars.size());
      const double rate = u > 0 ? std::min(1.0, power_cap / u) : 0.0;

      double t_event = next_arrival;
      Ev kind = Ev::arrival;
      if (u > 0) {
        const double t_comp = t + std::max(0.0, completions.begin()->first - effort) / rate;
        if (t_comp < t_event ||
            (t_comp == t_event && static_cast<int>(Ev::completion) < static_cast<int>(kind))) {
          t_event = t_comp;
          kind = Ev::completion;
        }
      }
      if (!departures.empty()) {
        const double t_dep = departures.top().first;
        if (t_dep < t_event ||
            (t_dep == t_event && static_cast<int>(Ev::departure) < static_cast<int>(kind))) {
          t_event = t_dep;
          kind = Ev::departure;
        }
      }

      if (cfg.mode == SimConfig::Mode::fixed_horizon && t_event >= cfg.horizon) {
        book.integrate(t, cfg.horizon, u, q);
        break;
      }
      book.integrate(t, t_event, u, q);
      effort += rate * (t_event - t);
      t = t_event;
      const bool counting = book.counting(t);
      detail::RepStats& st = book.slot_at(t);

      switch (kind) {
        case Ev::departure: {
          const std::int64_t id = departures.top().second;
          departures.pop();
          Car& car = cars.at(id);
          if (car.charged) {
            ++departures_seen;
            if (counting) ++st.dep_charged;
            if (car.record >= 0) records[car.record].status = EVRecord::Status::departed_charged;
          } else {
            completions.erase({car.effort_start + car.requirement, id});
            ++departures_seen;
            if (counting) ++st.dep_uncharged;
            if (car.record >= 0) {
              EVRecord& r = records[car.record];
              r.status = EVRecord::Status::departed_uncharged;
              r.attained_work = std::min(car.requirement, effort - car.effort_start);
            }
          }
          cars.erase(id);
          break;
        }
        case Ev::completion: {
          const auto it = completions.begin();
          effort = std::max(effort, it->first);  // snap roundoff
          Car& car = cars.at(it->second);
          car.charged = true;
          if (car.record >= 0) {
            records[car.record].status = EVRecord::Status::charged;
            records[car.record].attained_work = car.requirement;
          }
          completions.erase(it);
          break;
        }
        case Ev::arrival: {
          next_arrival = t + rng.exponential(arrival_rate);
          if (counting) ++st.arrivals;
          if (q >= spaces) {
            if (counting) ++st.blocked;
            if (recording && static_cast<std::int64_t>(records.size()) < cfg.max_records)
              records.push_back({t, 0.0, 0.0, 0.0, EVRecord::Status::blocked});
          } else {
            const double stay = parking.draw(rng);
            const double need = charging.draw(rng);
            Car car{need, effort, false, -1};
            if (recording && static_cast<std::int64_t>(records.size()) < cfg.max_records) {
              car.record = static_cast<std::int64_t>(records.size());
              records.push_back({t, stay, need, 0.0, EVRecord::Status::charging});
            }
            departures.emplace(t + stay, next_id);
            completions.insert({effort + need, next_id});
            cars.emplace(next_id, car);
            ++next_id;
            if (counting) ++st.admitted;
          }
          break;
        }
      }

      if (cfg.mode == SimConfig::Mode::fixed_departures) {
        if (!book.counting(t) && departures_seen >= warmup_deps) book.activate_now(t);
        if (departures_seen >= cfg.target_departures) break;
      }
    }
    local.back().in_system_at_end += static_cast<std::int64_t>(cars.size());
    if (cfg.batch_count > 0)
      slots = std::move(local);
    else
      slots[rep] = local[0];
  }

  SimEstimates out = detail::aggregate(slots, cfg);
  out.records = std::move(records);
  return out;
}

// ---------------------------------------------------------------------------
// Scaling experiments
// ---------------------------------------------------------------------------

/// Per-unit shape of the fluid-scaled family: the n-th system has arrival
/// rate n*arrival, round(n*spaces) spaces and n*power_cap power.
struct FluidScalingBase {
  double arrival = 1.0;
  double parking_rate = 1.0;
  double charging_rate = 1.0;
  double spaces = 2.0;
  double power_cap = 1.0;
};

struct FluidScalingRow {
  int n = 0;
  ModelParams params;
  EstimateWithCI scaled_mean_uncharged;  // mean U_n / n
  double u_star_raw = 0.0;       // limit fixed point, prefactor min{lambda, mu K}
  double u_star_blocking = 0.0;  // per-n fixed point with the Erlang-B prefactor
};

/// Simulates the scaled systems and tabulates mean U_n/n next to both fluid
/// fixed points.
inline std::vector<FluidScalingRow> fluid_scaling_experiment(const FluidScalingBase& base,
                                                             const std::vector<int>& n_list,
                                                             const SimConfig& cfg) {
  if (n_list.empty()) throw InvalidParams("fluid_scaling_experiment: empty n list");
  const double raw_admitted =
      std::min(base.arrival, base.parking_rate * base.spaces);
  const FluidSolution raw = fluid_solution_exponential(
      raw_admitted, 1.0 - raw_admitted / base.arrival, base.parking_rate, base.charging_rate,
      base.power_cap);

  std::vector<FluidScalingRow> rows;
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    const int n = n_list[i];
    if (n < 1) throw InvalidParams("fluid_scaling_experiment: n must be >= 1");
    FluidScalingRow row;
    row.n = n;
    row.params.arrival_rate = n * base.arrival;
    row.params.parking_rate = base.parking_rate;
    row.params.charging_rate = base.charging_rate;
    row.params.spaces = static_cast<int>(std::max(1.0, std::round(n * base.spaces)));
    row.params.power_cap = std::min(n * base.power_cap, static_cast<double>(row.params.spaces));

    SimConfig point_cfg = cfg;
    point_cfg.master_seed = derive_seed(cfg.master_seed, 0xF1u, static_cast<std::uint64_t>(n));
    const SimEstimates est = simulate_markovian(row.params, point_cfg);
    row.scaled_mean_uncharged = est.mean_uncharged;
    row.scaled_mean_uncharged.value /= n;
    row.scaled_mean_uncharged.half_width /= n;

    row.u_star_raw = raw.u_star;
    const double p_block =
        erlang_b(row.params.spaces, row.params.arrival_rate / base.parking_rate);
    row.u_star_blocking =
        fluid_solution_exponential(base.arrival * (1.0 - p_block), p_block, base.parking_rate,
                                   base.charging_rate, base.power_cap)
            .u_star;
    rows.push_back(row);
  }
  return rows;
}

/// Scaled-occupancy moments of the pre-limit chain under the square-root
/// staffing regime, next to the SDE (and, when kappa = +infinity, the
/// explicit-density) stationary moments.
struct DiffusionScalingResult {
  ModelParams pre_limit;
  EstimateWithCI mean_u_hat, mean_q_hat;
  EstimateWithCI var_u_hat, var_q_hat, cov_uq_hat;
  SdeMoments sde;
  std::optional<SdeMoments> density;
};

/// When kappa = +infinity the pre-limit lot still needs a finite space count;
/// it is placed this many sqrt(n) units above the occupancy centering, far
/// enough that the constraint effectively never binds.
inline constexpr double kUnboundedSpaceOffset = 10.0;

inline DiffusionScalingResult diffusion_scaling_experiment(const ScalingRegime& r,
                                                           const SimConfig& cfg,
                                                           const SdeOptions& sde_opts) {
  validate(r.spec);
  ModelParams p;
  if (std::isfinite(r.spec.kappa)) {
    p = scaled_params(r);
  } else {
    ScalingRegime proxy = r;
    proxy.spec.kappa = kUnboundedSpaceOffset;
    p = scaled_params(proxy);
  }

  detail::check_sim_config(cfg);
  const int units = cfg.batch_count > 0 ? cfg.batch_count : cfg.replications;
  std::vector<detail::RepStats> slots(units);
  if (cfg.batch_count > 0) {
    detail::run_markovian_rep(p, cfg, 0, slots);
  } else {
    for (int rep = 0; rep < cfg.replications; ++rep) {
      std::vector<detail::RepStats> one(1);
      detail::run_markovian_rep(p, cfg, static_cast<std::uint64_t>(rep), one);
      slots[rep] = one[0];
    }
  }

  const double sqrt_n = std::sqrt(static_cast<double>(r.n));
  const double cu = center_uncharged(r), cq = center_total(r);
  const std::string method = cfg.batch_count > 0 ? "batch-means" : "replications";
  DiffusionScalingResult out;
  out.pre_limit = p;
  out.mean_u_hat = detail::ci_over_units(slots, cfg.confidence, method,
      [&](const detail::RepStats& s) { return (s.mean_u() - cu) / sqrt_n; });
  out.mean_q_hat = detail::ci_over_units(slots, cfg.confidence, method,
      [&](const detail::RepStats& s) { return (s.mean_q() - cq) / sqrt_n; });
  out.var_u_hat = detail::ci_over_units(slots, cfg.confidence, method,
      [&](const detail::RepStats& s) { return s.var_u() / r.n; });
  out.var_q_hat = detail::ci_over_units(slots, cfg.confidence, method,
      [&](const detail::RepStats& s) { return s.var_q() / r.n; });
  out.cov_uq_hat = detail::ci_over_units(slots, cfg.confidence, method,
      [&](const detail::RepStats& s) { return s.cov_uq() / r.n; });

  out.sde = sde_stationary_moments(r.spec, sde_opts);
  if (!std::isfinite(r.spec.kappa))
    out.density = invariant_density(r.spec).moments();
  return out;
}

}  // namespace evlot
