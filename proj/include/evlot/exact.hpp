#pragma once

// Exact stationary analysis of the (uncharged, total) chain: global-balance
// solve on the full state space, stationary performance metrics, the Erlang B
// recursion, the infinite-lot birth-death law, the closed-form K=M product
// distribution, and the lower/upper bounds that sandwich the exact success
// probability.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "evlot/errors.hpp"
#include "evlot/model.hpp"

namespace evlot {

struct StationaryDistribution {
  ModelParams params;
  std::vector<double> probs;  // aligned with enumerate_states(params.spaces)
};

struct PerformanceMetrics {
  double mean_uncharged = 0.0;  // E[U]
  double mean_total = 0.0;      // E[Q]
  double mean_charged = 0.0;    // E[C] = E[Q] - E[U]
  double p_block = 0.0;         // P(Q = K)
  double success = 0.0;         // E[C] / E[Q]
};

struct BoundsResult {
  double lower = 0.0;
  double upper = 1.0;
};

struct SolveOptions {
  enum class Method { automatic, direct, gauss_seidel };
  Method method = Method::automatic;
  std::int64_t max_states = 1'000'000;
  // Direct sparse LU up to this many states (K = 200), iterative above.
  std::int64_t direct_state_limit = 20'301;
  double gs_tolerance = 1e-14;
  std::int64_t gs_max_sweeps = 500'000;
};

namespace detail {

inline std::vector<double> solve_direct(const ModelParams& p,
                                        const std::vector<StateUQ>& states) {
  const int n = static_cast<int>(states.size());
  // Balance equations pi * G = 0 transpose to G^T x = 0; the last balance row
  // is replaced by the normalization sum(pi) = 1.
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(5 * n + n));
  std::vector<double> diag(n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (const Transition& t : transitions(p, states[i])) {
      const int j = state_index(t.target);
      diag[i] -= t.rate;
      if (j != n - 1) trip.emplace_back(j, i, t.rate);
    }
  }
  for (int i = 0; i < n - 1; ++i) trip.emplace_back(i, i, diag[i]);
  for (int i = 0; i < n; ++i) trip.emplace_back(n - 1, i, 1.0);

  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.analyzePattern(A);
  lu.factorize(A);
  if (lu.info() != Eigen::Success)
    throw SolverError("stationary_distribution: singular generator (transition-structure bug)");
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b[n - 1] = 1.0;
  Eigen::VectorXd x = lu.solve(b);
  if (lu.info() != Eigen::Success)
    throw SolverError("stationary_distribution: sparse solve failed");
  return std::vector<double>(x.data(), x.data() + n);
}

inline std::vector<double> solve_gauss_seidel(const ModelParams& p,
                                              const std::vector<StateUQ>& states,
                                              const SolveOptions& opts) {
  const int n = static_cast<int>(states.size());
  std::vector<double> outflow(n);
  std::vector<std::vector<std::pair<int, double>>> inflows(n);
  for (int i = 0; i < n; ++i) {
    outflow[i] = total_outflow_rate(p, states[i]);
    for (const Transition& t : transitions(p, states[i]))
      inflows[state_index(t.target)].emplace_back(i, t.rate);
  }
  std::vector<double> pi(n, 1.0 / n);
  for (std::int64_t sweep = 0; sweep < opts.gs_max_sweeps; ++sweep) {
    double delta = 0.0;
    for (int i = 0; i < n; ++i) {
      double in = 0.0;
      for (const auto& [j, r] : inflows[i]) in += pi[j] * r;
      const double next = in / outflow[i];
      delta = std::max(delta, std::abs(next - pi[i]));
      pi[i] = next;
    }
    double sum = 0.0;
    for (double v : pi) sum += v;
    for (double& v : pi) v /= sum;
    if (delta < opts.gs_tolerance) return pi;
  }
  throw SolverError("stationary_distribution: Gauss-Seidel did not converge within sweep limit");
}

}  // namespace detail

/// Solves pi G = 0, sum(pi) = 1 on the generator built from `transitions`.
/// Direct sparse LU for small-to-moderate state spaces; Gauss-Seidel sweeps
/// above `direct_state_limit`. Deterministic for fixed inputs.
inline StationaryDistribution stationary_distribution(const ModelParams& p,
                                                      const SolveOptions& opts = {}) {
  validate(p);
  const std::int64_t n = state_count(p.spaces);
  if (n > opts.max_states)
    throw SolverError("stationary_distribution: " + std::to_string(n) +
                      " states exceeds limit " + std::to_string(opts.max_states));
  const std::vector<StateUQ> states = enumerate_states(p.spaces);

  std::vector<double> pi;
  const bool direct = opts.method == SolveOptions::Method::direct ||
                      (opts.method == SolveOptions::Method::automatic &&
                       n <= opts.direct_state_limit);
  if (direct)
    pi = detail::solve_direct(p, states);
  else
    pi = detail::solve_gauss_seidel(p, states, opts);

  // Scrub roundoff: probabilities a hair below zero are set to zero, anything
  // materially negative signals a bug.
  double sum = 0.0;
  for (double& v : pi) {
    if (v < 0.0) {
      if (v < -1e-9) throw SolverError("stationary_distribution: negative probability " +
                                       std::to_string(v));
      v = 0.0;
    }
    sum += v;
  }
  for (double& v : pi) v /= sum;
  return {p, std::move(pi)};
}

/// Max absolute net flow over all states; ~1e-13 for a correct solve.
inline double global_balance_residual(const StationaryDistribution& d) {
  const std::vector<StateUQ> states = enumerate_states(d.params.spaces);
  std::vector<double> net(states.size(), 0.0);
  for (std::size_t i = 0; i < states.size(); ++i) {
    for (const Transition& t : transitions(d.params, states[i])) {
      net[i] -= d.probs[i] * t.rate;
      net[state_index(t.target)] += d.probs[i] * t.rate;
    }
  }
  double worst = 0.0;
  for (double v : net) worst = std::max(worst, std::abs(v));
  return worst;
}

/// Occupancy marginal P(Q = q) for q = 0..K.
inline std::vector<double> occupancy_marginal(const StationaryDistribution& d) {
  std::vector<double> marginal(d.params.spaces + 1, 0.0);
  const std::vector<StateUQ> states = enumerate_states(d.params.spaces);
  for (std::size_t i = 0; i < states.size(); ++i) marginal[states[i].total] += d.probs[i];
  return marginal;
}

/// E[min{U, M}] under the solved law (mean power actually drawn).
inline double mean_power_drawn(const StationaryDistribution& d) {
  const std::vector<StateUQ> states = enumerate_states(d.params.spaces);
  double acc = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i)
    acc += d.probs[i] * power(states[i].uncharged, d.params.power_cap);
  return acc;
}

inline PerformanceMetrics metrics(const StationaryDistribution& d) {
  const std::vector<StateUQ> states = enumerate_states(d.params.spaces);
  PerformanceMetrics m;
  for (std::size_t i = 0; i < states.size(); ++i) {
    m.mean_uncharged += states[i].uncharged * d.probs[i];
    m.mean_total += states[i].total * d.probs[i];
    if (states[i].total == d.params.spaces) m.p_block += d.probs[i];
  }
  m.mean_charged = m.mean_total - m.mean_uncharged;
  if (m.mean_total <= 0.0)
    throw NumericalError("metrics: mean occupancy is zero, success ratio undefined");
  m.success = m.mean_charged / m.mean_total;
  return m;
}

/// Erlang B blocking probability for K servers at offered load a, via the
/// stable recursion B_0 = 1, B_k = a B_{k-1} / (k + a B_{k-1}).
inline double erlang_b(int servers, double offered_load) {
  if (servers < 0) throw InvalidParams("erlang_b: servers must be >= 0");
  if (!(offered_load > 0.0)) throw InvalidParams("erlang_b: offered load must be > 0");
  double b = 1.0;
  for (int k = 1; k <= servers; ++k) b = offered_load * b / (k + offered_load * b);
  return b;
}

struct ErlangAVariantResult {
  std::vector<double> probs;  // P(U = u), u = 0..truncation
  double mean = 0.0;          // E[U]
};

/// Stationary law of the uncharged count in the infinite lot (K = infinity):
/// a birth-death chain with birth rate lambda and death rate
/// mu*u + nu*min{u, M}. Unlike the classical Erlang A queue, cars in service
/// abandon too, so the parking term mu*u covers every uncharged car. The
/// series is truncated once a geometric bound puts both the tail mass and the
/// tail contribution to E[U] below tail_eps (relative).
inline ErlangAVariantResult erlang_a_variant(double lambda, double mu, double nu, double power_cap,
                                             double tail_eps = 1e-12) {
  if (!(lambda > 0.0) || !(mu > 0.0) || !(nu > 0.0))
    throw InvalidParams("erlang_a_variant: rates must be > 0");
  if (!(power_cap > 0.0)) throw InvalidParams("erlang_a_variant: power_cap must be > 0");
  if (!(tail_eps > 0.0 && tail_eps < 1.0))
    throw InvalidParams("erlang_a_variant: tail_eps must be in (0,1)");

  std::vector<double> w{1.0};
  double sum = 1.0, mean_sum = 0.0;
  for (int u = 1;; ++u) {
    const double death = mu * u + nu * std::min(static_cast<double>(u), power_cap);
    w.push_back(w.back() * lambda / death);
    sum += w.back();
    mean_sum += u * w.back();
    const double next_death = mu * (u + 1) + nu * std::min(static_cast<double>(u + 1), power_cap);
    const double r = lambda / next_death;
    if (r < 0.5) {
      const double tail_mass = w.back() * r / (1.0 - r);
      const double tail_mean = w.back() * (u * r / (1.0 - r) + r / ((1.0 - r) * (1.0 - r)));
      if (tail_mass < tail_eps * sum && tail_mean < tail_eps * (mean_sum + 1.0)) break;
    }
    if (u > 50'000'000) throw SolverError("erlang_a_variant: series truncation failed");
  }
  for (double& v : w) v /= sum;
  return {std::move(w), mean_sum / sum};
}

/// Lower bound on the success probability: the infinite-lot system (K = inf,
/// same M), whose occupancy is M/M/inf with mean lambda/mu.
inline double lower_bound(const ModelParams& p) {
  validate(p);
  const double mean_uncharged =
      erlang_a_variant(p.arrival_rate, p.parking_rate, p.charging_rate, p.power_cap).mean;
  const double mean_total = p.arrival_rate / p.parking_rate;
  return (mean_total - mean_uncharged) / mean_total;
}

/// Upper bound: charged count from the uncapped-power system (K, M=K) over
/// the occupancy of the real system (K, M). Both terms come from full chain
/// solves; the closed form below is only cross-checked in tests.
inline double upper_bound(const ModelParams& p, const SolveOptions& opts = {}) {
  validate(p);
  ModelParams full_power = p;
  full_power.power_cap = static_cast<double>(p.spaces);
  const PerformanceMetrics numerator = metrics(stationary_distribution(full_power, opts));
  const PerformanceMetrics denominator = metrics(stationary_distribution(p, opts));
  return numerator.mean_charged / denominator.mean_total;
}

/// Candidate closed form for the upper bound. When M = K the occupancy is the
/// Erlang loss law for every M and, given Q = q, the uncharged count is
/// Binomial(q, mu/(mu+nu)); the ratio then collapses to nu/(mu+nu). This is a
/// derived simplification, asserted equal to the chain solve in the tests;
/// the public upper_bound always reports the chain value.
inline double upper_bound_closed_form(const ModelParams& p) {
  return p.charging_rate / (p.parking_rate + p.charging_rate);
}

inline BoundsResult bounds(const ModelParams& p, const SolveOptions& opts = {}) {
  BoundsResult r{lower_bound(p), upper_bound(p, opts)};
  if (!(0.0 <= r.lower && r.lower <= r.upper + 1e-12 && r.upper <= 1.0 + 1e-12))
    throw NumericalError("bounds: sandwich ordering violated (lower=" +
                         std::to_string(r.lower) + ", upper=" + std::to_string(r.upper) + ")");
  return r;
}

/// Explicit product-form stationary law for the uncapped-power case M = K:
/// Erlang-loss occupancy weights times Binomial(q, mu/(mu+nu)) rows. Must
/// match stationary_distribution elementwise; tests pin this to 1e-10.
inline StationaryDistribution joint_km_decomposition(const ModelParams& p) {
  validate(p);
  if (p.power_cap != static_cast<double>(p.spaces))
    throw InvalidParams("joint_km_decomposition: requires M = K");

  const double a = p.arrival_rate / p.parking_rate;
  std::vector<double> occupancy(p.spaces + 1);
  occupancy[0] = 1.0;
  double z = 1.0;
  for (int q = 1; q <= p.spaces; ++q) {
    occupancy[q] = occupancy[q - 1] * a / q;
    z += occupancy[q];
  }
  for (double& v : occupancy) v /= z;

  const double p_uncharged = p.parking_rate / (p.parking_rate + p.charging_rate);
  std::vector<double> probs(state_count(p.spaces));
  for (int q = 0; q <= p.spaces; ++q) {
    // Binomial(q, p_uncharged) row, built by the usual pmf recursion.
    double pmf = std::pow(1.0 - p_uncharged, q);
    for (int u = 0; u <= q; ++u) {
      probs[state_index({u, q})] = occupancy[q] * pmf;
      if (u < q)
        pmf *= (static_cast<double>(q - u) / (u + 1)) * (p_uncharged / (1.0 - p_uncharged));
    }
  }
  return {p, std::move(probs)};
}

}  // namespace evlot
