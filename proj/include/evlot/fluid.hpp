#pragma once

// Fluid (law-of-large-numbers) approximation of the lot. The uncharged mass
// solves a fixed-point equation whose right-hand side is the admitted inflow
// times the mean of min{parking time, slowed-down charging time}; the fluid
// success probability follows from the same slowdown factor. Everything here
// also accepts general parking/charging distributions, with the exponential
// case reproducing the closed two-branch form.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "evlot/errors.hpp"
#include "evlot/exact.hpp"
#include "evlot/model.hpp"
#include "evlot/rng.hpp"
#include "evlot/stats.hpp"

namespace evlot {

/// A nonnegative service-time law: exponential, deterministic, or a
/// user-supplied quantile sampler (inverse-CDF; draws are quantile(U) for
/// U uniform on [0,1), which makes every draw reproducible under a seed).
class DistributionSpec {
 public:
  enum class Kind { exponential, deterministic, sampler };

  static DistributionSpec exponential(double rate) {
    if (!(rate > 0.0)) throw InvalidParams("DistributionSpec: rate must be > 0");
    DistributionSpec d;
    d.kind_ = Kind::exponential;
    d.rate_ = rate;
    d.mean_ = 1.0 / rate;
    return d;
  }

  static DistributionSpec deterministic(double value) {
    if (!(value > 0.0)) throw InvalidParams("DistributionSpec: value must be > 0");
    DistributionSpec d;
    d.kind_ = Kind::deterministic;
    d.value_ = value;
    d.mean_ = value;
    return d;
  }

  static DistributionSpec sampler(double mean, std::function<double(double)> quantile) {
    if (!(mean > 0.0) || !std::isfinite(mean))
      throw InvalidParams("DistributionSpec: mean must be positive and finite");
    if (!quantile) throw InvalidParams("DistributionSpec: quantile function required");
    DistributionSpec d;
    d.kind_ = Kind::sampler;
    d.mean_ = mean;
    d.quantile_ = std::move(quantile);
    return d;
  }

  Kind kind() const { return kind_; }
  double mean() const { return mean_; }
  double rate() const { return rate_; }
  double value() const { return value_; }

  double quantile(double v) const {
    switch (kind_) {
      case Kind::exponential: return -std::log1p(-v) / rate_;
      case Kind::deterministic: return value_;
      case Kind::sampler: return quantile_(v);
    }
    return 0.0;
  }

  double draw(RngStream& rng) const { return quantile(rng.u01()); }

  bool has_survival() const { return kind_ != Kind::sampler; }

  /// P(X > t), right-continuous in t.
  double survival(double t) const {
    switch (kind_) {
      case Kind::exponential: return t <= 0.0 ? 1.0 : std::exp(-rate_ * t);
      case Kind::deterministic: return t < value_ ? 1.0 : 0.0;
      case Kind::sampler:
        throw InvalidParams("DistributionSpec: sampler kind has no survival function");
    }
    return 0.0;
  }

  /// Essential supremum (infinity for exponential).
  double upper_support() const {
    return kind_ == Kind::deterministic ? value_ : std::numeric_limits<double>::infinity();
  }

 private:
  Kind kind_ = Kind::exponential;
  double rate_ = 1.0;
  double value_ = 1.0;
  double mean_ = 1.0;
  std::function<double(double)> quantile_;
};

enum class FluidRegime { underloaded, overloaded };

inline const char* to_string(FluidRegime r) {
  return r == FluidRegime::underloaded ? "underloaded" : "overloaded";
}

struct FluidSolution {
  double u_star = 0.0;      // fluid uncharged mass
  FluidRegime regime = FluidRegime::underloaded;
  double p_s = 0.0;         // fluid success probability
  double p_block = 0.0;     // blocking probability used in the fixed point
};

struct FluidOptions {
  double bisect_tol = 1e-12;      // absolute tolerance on u*
  double quad_tol = 1e-10;        // absolute tolerance for quadrature paths
  std::int64_t mc_samples = 400'000;
  std::uint64_t mc_seed = 0x51D0u;
  double mc_ci_tolerance = 5e-3;  // reject Monte Carlo estimates wider than this
  double confidence = 0.99;
};

namespace detail {

/// E[min{B, c D}] by integrating the survival product P(B>t) P(D>t/c).
/// Deterministic factors only truncate the domain, so the integrand is smooth
/// on the integration range.
inline double expected_min_quadrature(const DistributionSpec& b, const DistributionSpec& d,
                                      double slowdown, double tol) {
  const double upper = std::min(b.upper_support(), slowdown * d.upper_support());
  const auto integrand = [&](double t) { return b.survival(t) * d.survival(t / slowdown); };
  double error = 0.0;
  double value = 0.0;
  if (std::isfinite(upper)) {
    value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        integrand, 0.0, upper, 15, tol, &error);
  } else {
    boost::math::quadrature::exp_sinh<double> integrator;
    value = integrator.integrate(integrand, tol, &error);
  }
  if (error > std::max(tol, 1e-14) * std::max(1.0, std::abs(value)))
    throw NumericalError("expected_min: quadrature reached error " + std::to_string(error) +
                         " > tolerance " + std::to_string(tol));
  return value;
}

inline EstimateWithCI expected_min_monte_carlo(const DistributionSpec& b,
                                               const DistributionSpec& d, double slowdown,
                                               const FluidOptions& opts) {
  RngStream rng(opts.mc_seed, 0);
  RunningMoments acc;
  for (std::int64_t i = 0; i < opts.mc_samples; ++i) {
    const double bs = b.quantile(rng.u01());
    const double ds = d.quantile(rng.u01());
    acc.add(std::min(bs, slowdown * ds));
  }
  EstimateWithCI est;
  est.value = acc.mean();
  est.confidence = opts.confidence;
  est.sample_count = static_cast<int>(std::min<std::int64_t>(opts.mc_samples,
                                                             std::numeric_limits<int>::max()));
  est.method = "monte-carlo";
  const double z = normal_quantile(0.5 + opts.confidence / 2.0);
  est.half_width = z * std::sqrt(std::max(0.0, acc.variance()) / opts.mc_samples);
  return est;
}

}  // namespace detail

/// E[min{B, c D}] for independent B, D and slowdown c >= 1. Exponential pairs
/// use the closed form 1/(mu + nu/c); pairs with survival access are
/// integrated; sampler pairs fall back to Monte Carlo and reject estimates
/// whose confidence interval exceeds the configured tolerance.
inline double expected_min(const DistributionSpec& b, const DistributionSpec& d, double slowdown,
                           const FluidOptions& opts = {}) {
  if (!(slowdown >= 1.0)) throw InvalidParams("expected_min: slowdown must be >= 1");
  if (b.kind() == DistributionSpec::Kind::exponential &&
      d.kind() == DistributionSpec::Kind::exponential)
    return 1.0 / (b.rate() + d.rate() / slowdown);
  if (b.has_survival() && d.has_survival())
    return detail::expected_min_quadrature(b, d, slowdown, opts.quad_tol);
  const EstimateWithCI est = detail::expected_min_monte_carlo(b, d, slowdown, opts);
  if (est.half_width > opts.mc_ci_tolerance)
    throw NumericalError("expected_min: Monte Carlo half-width " +
                         std::to_string(est.half_width) + " exceeds tolerance " +
                         std::to_string(opts.mc_ci_tolerance));
  return est.value;
}

/// P(B > c D): the probability charging (slowed by c) beats parking.
inline double success_given_slowdown(const DistributionSpec& b, const DistributionSpec& d,
                                     double slowdown, const FluidOptions& opts = {}) {
  if (!(slowdown >= 1.0)) throw InvalidParams("success_given_slowdown: slowdown must be >= 1");
  using Kind = DistributionSpec::Kind;
  if (b.kind() == Kind::exponential && d.kind() == Kind::exponential)
    return d.rate() / (d.rate() + b.rate() * slowdown);
  if (d.kind() == Kind::deterministic && b.has_survival())
    return b.survival(slowdown * d.value());
  if (b.kind() == Kind::deterministic && d.kind() == Kind::exponential)
    return 1.0 - std::exp(-d.rate() * b.value() / slowdown);
  // Sampler on either side: Monte Carlo on the indicator.
  RngStream rng(opts.mc_seed, 1);
  RunningMoments acc;
  for (std::int64_t i = 0; i < opts.mc_samples; ++i) {
    const double bs = b.quantile(rng.u01());
    const double ds = d.quantile(rng.u01());
    acc.add(bs > slowdown * ds ? 1.0 : 0.0);
  }
  const double z = normal_quantile(0.5 + opts.confidence / 2.0);
  const double hw = z * std::sqrt(std::max(0.0, acc.variance()) / opts.mc_samples);
  if (hw > opts.mc_ci_tolerance)
    throw NumericalError("success_given_slowdown: Monte Carlo half-width " +
                         std::to_string(hw) + " exceeds tolerance " +
                         std::to_string(opts.mc_ci_tolerance));
  return acc.mean();
}

/// Two-branch closed form of the exponential fixed point for a given admitted
/// rate. If the unconstrained solution fits under the power cap the slowdown
/// is 1; otherwise power saturates at M and the balance is linear in u*.
/// The space count enters only through the admitted rate, so this form also
/// serves per-unit (real-valued) capacities in the scaling experiments.
inline FluidSolution fluid_solution_exponential(double admitted_rate, double p_block, double mu,
                                                double nu, double power_cap) {
  if (!(admitted_rate > 0.0) || !(mu > 0.0) || !(nu > 0.0) || !(power_cap > 0.0))
    throw InvalidParams("fluid_solution_exponential: rates and power_cap must be > 0");
  FluidSolution sol;
  sol.p_block = p_block;
  const double unconstrained = admitted_rate / (mu + nu);
  if (unconstrained <= power_cap) {
    sol.u_star = unconstrained;
    sol.regime = FluidRegime::underloaded;
    sol.p_s = nu / (mu + nu);
  } else {
    sol.u_star = (admitted_rate - nu * power_cap) / mu;
    sol.regime = FluidRegime::overloaded;
    sol.p_s = nu * power_cap / admitted_rate;
  }
  return sol;
}

/// Fluid fixed point with the blocking-probability prefactor: solves
/// u* = lambda (1 - P_K) E[min{E_mu, E_nu max{1, u*/M}}] with
/// P_K = erlang_b(K, lambda/mu).
inline FluidSolution fluid_fixed_point(const ModelParams& p) {
  validate(p);
  const double p_block = erlang_b(p.spaces, p.arrival_rate / p.parking_rate);
  return fluid_solution_exponential(p.arrival_rate * (1.0 - p_block), p_block, p.parking_rate,
                                    p.charging_rate, p.power_cap);
}

/// Same fixed point with the limit-theorem prefactor min{lambda, mu K};
/// exposed for comparison experiments. The reported p_block is the implied
/// fluid loss fraction max{0, 1 - mu K / lambda}.
inline FluidSolution fluid_fixed_point_raw(const ModelParams& p) {
  validate(p);
  const double admitted =
      std::min(p.arrival_rate, p.parking_rate * static_cast<double>(p.spaces));
  return fluid_solution_exponential(admitted, 1.0 - admitted / p.arrival_rate, p.parking_rate,
                                    p.charging_rate, p.power_cap);
}

/// Fluid success probability: nu/(mu+nu) when power never saturates,
/// nu M / (lambda (1 - P_K)) when it does.
inline double fluid_success(const ModelParams& p) { return fluid_fixed_point(p).p_s; }

/// Fixed point for general independent parking law B and charging law D:
/// u* = lambda (1 - P_K) E[min{B, D max{1, u*/M}}], solved by bisection on
/// [0, lambda (1 - P_K) E[B]] (the right-hand side is nondecreasing, concave,
/// and bounded by the bracket end, so exactly one crossing exists). Blocking
/// uses the offered load lambda E[B] through Erlang-loss insensitivity.
inline FluidSolution general_fluid_fixed_point(double arrival_rate, int spaces, double power_cap,
                                               const DistributionSpec& parking,
                                               const DistributionSpec& charging,
                                               const FluidOptions& opts = {}) {
  if (!(arrival_rate > 0.0)) throw InvalidParams("general_fluid_fixed_point: arrival_rate > 0");
  if (spaces < 1) throw InvalidParams("general_fluid_fixed_point: spaces >= 1");
  if (!(power_cap > 0.0) || power_cap > static_cast<double>(spaces))
    throw InvalidParams("general_fluid_fixed_point: power_cap in (0, spaces]");

  const double p_block = erlang_b(spaces, arrival_rate * parking.mean());
  const double admitted = arrival_rate * (1.0 - p_block);
  const auto rhs = [&](double u) {
    return admitted * expected_min(parking, charging, std::max(1.0, u / power_cap), opts);
  };

  double lo = 0.0, hi = admitted * parking.mean();
  if (rhs(hi) >= hi) {
    lo = hi;  // right-hand side saturates the bracket end (min{B, cD} = B a.s.)
  } else {
    while (hi - lo > opts.bisect_tol) {
      const double mid = 0.5 * (lo + hi);
      (rhs(mid) >= mid ? lo : hi) = mid;
    }
  }
  FluidSolution sol;
  sol.p_block = p_block;
  sol.u_star = 0.5 * (lo + hi);
  sol.regime = sol.u_star <= power_cap ? FluidRegime::underloaded : FluidRegime::overloaded;
  sol.p_s = success_given_slowdown(parking, charging, std::max(1.0, sol.u_star / power_cap), opts);
  return sol;
}

}  // namespace evlot
