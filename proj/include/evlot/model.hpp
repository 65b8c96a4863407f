#pragma once

// Markov model of a charging parking lot: K spaces with one charger each,
// Poisson arrivals, exponential parking and charging times, and a shared
// power budget that charges at most M cars at full rate. The system state is
// the pair (uncharged cars, total cars); the number of fully charged cars is
// always the difference and is never stored separately.

#include <cstdint>
#include <string>
#include <vector>

#include "evlot/errors.hpp"

namespace evlot {

/// Parameters of one lot instance.
///
/// `power_cap` (the number of cars chargeable at full power) may be any real
/// in (0, spaces]: the transition rates only use min{u, power_cap}, which is
/// well defined off the integers, and the fluid sweeps evaluate ratios
/// M/K that are not integer multiples. Integer values recover the usual model.
struct ModelParams {
  double arrival_rate = 1.0;   // lambda, EVs per unit time
  double parking_rate = 1.0;   // mu, reciprocal mean parking time
  double charging_rate = 1.0;  // nu, reciprocal mean full-power charging time
  int spaces = 1;              // K, parking spaces (each has a charger)
  double power_cap = 1.0;      // M, cars chargeable at full power
};

inline void validate(const ModelParams& p) {
  if (!(p.arrival_rate > 0.0)) throw InvalidParams("arrival_rate must be > 0");
  if (!(p.parking_rate > 0.0)) throw InvalidParams("parking_rate must be > 0");
  if (!(p.charging_rate > 0.0)) throw InvalidParams("charging_rate must be > 0");
  if (p.spaces < 1) throw InvalidParams("spaces must be >= 1");
  if (!(p.power_cap > 0.0) || p.power_cap > static_cast<double>(p.spaces))
    throw InvalidParams("power_cap must lie in (0, spaces]");
}

/// A point of the two-dimensional chain: `uncharged` cars still drawing
/// power and `total` cars parked. Feasible iff 0 <= uncharged <= total <= K.
struct StateUQ {
  int uncharged = 0;
  int total = 0;

  int charged() const { return total - uncharged; }
  bool operator==(const StateUQ&) const = default;
};

inline bool state_valid(const StateUQ& s, int spaces) {
  return 0 <= s.uncharged && s.uncharged <= s.total && s.total <= spaces;
}

/// One outgoing edge of the transition graph.
struct Transition {
  StateUQ target;
  double rate = 0.0;
};

/// Total charging power drawn when `uncharged` cars need charge: min{u, M}.
/// Each uncharged car charges at power(u, M) / u, i.e. min{1, M/u}.
inline double power(int uncharged, double power_cap) {
  if (uncharged < 0) throw InvalidParams("power: uncharged must be >= 0");
  if (!(power_cap > 0.0)) throw InvalidParams("power: power_cap must be > 0");
  const double u = static_cast<double>(uncharged);
  return u < power_cap ? u : power_cap;
}

/// All feasible states in lexicographic (total, uncharged) order, so states
/// with the same occupancy form contiguous blocks. Length (K+1)(K+2)/2.
inline std::vector<StateUQ> enumerate_states(int spaces) {
  if (spaces < 1) throw InvalidParams("enumerate_states: spaces must be >= 1");
  std::vector<StateUQ> states;
  states.reserve(static_cast<std::size_t>(spaces + 1) * (spaces + 2) / 2);
  for (int q = 0; q <= spaces; ++q)
    for (int u = 0; u <= q; ++u) states.push_back({u, q});
  return states;
}

/// Position of `s` in enumerate_states order: q(q+1)/2 + u.
inline int state_index(const StateUQ& s) {
  return s.total * (s.total + 1) / 2 + s.uncharged;
}

inline int state_count(int spaces) { return (spaces + 1) * (spaces + 2) / 2; }

/// Outgoing transitions of `s`, zero-rate entries omitted:
///   arrival        (u+1, q+1)  rate lambda        if q < K
///   uncharged exit (u-1, q-1)  rate mu * u        if u > 0
///   charged exit   (u,   q-1)  rate mu * (q - u)  if q > u
///   charge done    (u-1, q)    rate nu * min{u,M} if u > 0
inline std::vector<Transition> transitions(const ModelParams& p, const StateUQ& s) {
  validate(p);
  if (!state_valid(s, p.spaces))
    throw InvalidParams("transitions: state (" + std::to_string(s.uncharged) + "," +
                        std::to_string(s.total) + ") infeasible for K=" +
                        std::to_string(p.spaces));
  std::vector<Transition> out;
  out.reserve(4);
  if (s.total < p.spaces)
    out.push_back({{s.uncharged + 1, s.total + 1}, p.arrival_rate});
  if (s.uncharged > 0)
    out.push_back({{s.uncharged - 1, s.total - 1}, p.parking_rate * s.uncharged});
  if (s.total > s.uncharged)
    out.push_back({{s.uncharged, s.total - 1}, p.parking_rate * (s.total - s.uncharged)});
  if (s.uncharged > 0) {
    const double completion = p.charging_rate * power(s.uncharged, p.power_cap);
    if (completion > 0.0) out.push_back({{s.uncharged - 1, s.total}, completion});
  }
  return out;
}

/// Total outflow rate of `s`: lambda 1{q<K} + mu q + nu min{u, M}.
inline double total_outflow_rate(const ModelParams& p, const StateUQ& s) {
  double rate = p.parking_rate * s.total + p.charging_rate * power(s.uncharged, p.power_cap);
  if (s.total < p.spaces) rate += p.arrival_rate;
  return rate;
}

}  // namespace evlot
