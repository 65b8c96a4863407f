#pragma once

// Square-root-staffing diffusion regime: the pre-limit parameter mapping, the
// reflected two-dimensional limit SDE driven by correlated Brownian motions,
// a 2x2 Lyapunov solver used as the linear-regime oracle, and the explicit
// piecewise-Gaussian invariant density for the unbounded-lot case, with its
// patching constants derived from continuity of the autonomous first marginal.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "evlot/errors.hpp"
#include "evlot/model.hpp"
#include "evlot/rng.hpp"
#include "evlot/stats.hpp"

namespace evlot {

/// Second-order capacity terms: power capacity sits beta*sqrt(n) above its
/// critical centering and space capacity kappa*sqrt(n) above its own.
/// kappa = +infinity removes the space constraint (and the reflection).
struct DiffusionSpec {
  double beta = 0.0;
  double kappa = std::numeric_limits<double>::infinity();
  double nu = 1.0;  // charging rate
  double mu = 1.0;  // parking rate
};

inline void validate(const DiffusionSpec& s) {
  if (!(s.nu > 0.0) || !(s.mu > 0.0)) throw InvalidParams("DiffusionSpec: rates must be > 0");
  if (std::isnan(s.beta) || std::isnan(s.kappa)) throw InvalidParams("DiffusionSpec: NaN term");
}

/// A pre-limit system index n together with the diffusion terms.
struct ScalingRegime {
  int n = 100;
  DiffusionSpec spec;
};

/// Centerings of the scaled processes: U is centered at lambda_n/(nu+mu) = n
/// and Q at lambda_n/mu.
inline double center_uncharged(const ScalingRegime& r) { return static_cast<double>(r.n); }
inline double center_total(const ScalingRegime& r) {
  return r.n * (r.spec.nu + r.spec.mu) / r.spec.mu;
}

/// Pre-limit parameters under square-root staffing: lambda_n = n(nu+mu),
/// M_n = n + beta sqrt(n) (kept real), K_n = n(nu+mu)/mu + kappa sqrt(n)
/// rounded to the nearest integer. Finite kappa only.
inline ModelParams scaled_params(const ScalingRegime& r) {
  validate(r.spec);
  if (r.n < 1) throw InvalidParams("scaled_params: n must be >= 1");
  if (!std::isfinite(r.spec.kappa))
    throw InvalidParams("scaled_params: kappa must be finite for a pre-limit system");
  const double sqrt_n = std::sqrt(static_cast<double>(r.n));
  const double power_cap = r.n + r.spec.beta * sqrt_n;
  if (!(power_cap > 0.0)) throw InvalidParams("scaled_params: M_n = n + beta sqrt(n) <= 0");
  const double spaces_real = center_total(r) + r.spec.kappa * sqrt_n;
  const long long spaces = std::llround(spaces_real);
  if (spaces < 1 || static_cast<double>(spaces) < power_cap)
    throw InvalidParams("scaled_params: K_n < M_n (or K_n < 1)");
  ModelParams p;
  p.arrival_rate = r.n * (r.spec.nu + r.spec.mu);
  p.parking_rate = r.spec.mu;
  p.charging_rate = r.spec.nu;
  p.spaces = static_cast<int>(spaces);
  p.power_cap = power_cap;
  return p;
}

/// Drift of the limit SDE: b1 = -nu min{x, beta} - mu x, b2 = -mu y.
inline std::pair<double, double> drift(double x, double y, const DiffusionSpec& s) {
  return {-s.nu * std::min(x, s.beta) - s.mu * x, -s.mu * y};
}

/// Correlation of the two driving Brownian motions; lies in (0,1) for all
/// positive rates.
inline double noise_correlation(const DiffusionSpec& s) {
  return (s.nu + 2.0 * s.mu) / (2.0 * (s.nu + s.mu));
}

/// One bivariate Gaussian increment with per-component variance 2(nu+mu)dt
/// and cross-covariance (nu+2mu)dt, from a Cholesky square root of the
/// correlation matrix.
inline std::pair<double, double> noise_increment(const DiffusionSpec& s, double dt,
                                                 RngStream& rng) {
  if (!(dt > 0.0)) throw InvalidParams("noise_increment: dt must be > 0");
  const double sigma = std::sqrt(2.0 * (s.nu + s.mu) * dt);
  const double rho = noise_correlation(s);
  const double z1 = rng.normal();
  const double z2 = rng.normal();
  return {sigma * z1, sigma * (rho * z1 + std::sqrt(1.0 - rho * rho) * z2)};
}

struct SdeOptions {
  double x0 = 0.0;
  double y0 = 0.0;
  double dt = 1e-3;
  double horizon = 1e4;
  std::uint64_t seed = 1;
  int record_stride = 10;        // keep every record_stride-th step
  double warmup_fraction = 0.1;  // discarded by the moment estimator only
};

/// Sample path of the scaled pair on the recorded grid. `reflection` is the
/// cumulative regulator Y; it is nondecreasing, starts at zero, and both
/// components were reduced by the same increments.
struct SDEPath {
  std::vector<double> times;
  std::vector<double> u_hat;
  std::vector<double> q_hat;
  std::vector<double> reflection;
};

struct SdeMoments {
  double mean_x = 0.0, mean_y = 0.0;
  double var_x = 0.0, var_y = 0.0, cov_xy = 0.0;
  double observed_time = 0.0;
};

namespace detail {

// Core Euler-Maruyama loop. on_step(t_after, x, y, y_total, reflected) is
// invoked once per step.
template <typename OnStep>
void run_sde(const DiffusionSpec& spec, const SdeOptions& opts, OnStep&& on_step) {
  validate(spec);
  if (!(opts.dt > 0.0) || !(opts.horizon > opts.dt))
    throw InvalidParams("simulate_sde: need dt > 0 and horizon > dt");
  if (std::isfinite(spec.kappa) && opts.y0 > spec.kappa)
    throw InvalidParams("simulate_sde: y0 must not exceed kappa");
  RngStream rng(opts.seed, 0);
  double x = opts.x0, y = opts.y0, y_total = 0.0;
  const std::int64_t steps = static_cast<std::int64_t>(opts.horizon / opts.dt);
  for (std::int64_t i = 1; i <= steps; ++i) {
    const auto [b1, b2] = drift(x, y, spec);
    const auto [dw1, dw2] = noise_increment(spec, opts.dt, rng);
    x += b1 * opts.dt + dw1;
    y += b2 * opts.dt + dw2;
    bool reflected = false;
    if (std::isfinite(spec.kappa) && y > spec.kappa) {
      const double excess = y - spec.kappa;
      y -= excess;
      x -= excess;
      y_total += excess;
      reflected = true;
    }
    on_step(i * opts.dt, x, y, y_total, reflected);
  }
}

}  // namespace detail

/// Euler-Maruyama discretization of the limit SDE. When the space term binds,
/// the step is projected back along (-1,-1): both components are reduced by
/// the same regulator increment. Deterministic per (seed, dt, horizon).
inline SDEPath simulate_sde(const DiffusionSpec& spec, const SdeOptions& opts) {
  SDEPath path;
  const std::int64_t steps = static_cast<std::int64_t>(opts.horizon / opts.dt);
  const std::int64_t stride = std::max(1, opts.record_stride);
  path.times.reserve(static_cast<std::size_t>(steps / stride + 2));
  path.times.push_back(0.0);
  path.u_hat.push_back(opts.x0);
  path.q_hat.push_back(opts.y0);
  path.reflection.push_back(0.0);
  std::int64_t i = 0;
  detail::run_sde(spec, opts, [&](double t, double x, double y, double y_total, bool) {
    if (++i % stride == 0) {
      path.times.push_back(t);
      path.u_hat.push_back(x);
      path.q_hat.push_back(y);
      path.reflection.push_back(y_total);
    }
  });
  return path;
}

/// Stationary moment estimates from one long path, full step resolution,
/// first warmup_fraction of the horizon discarded.
inline SdeMoments sde_stationary_moments(const DiffusionSpec& spec, const SdeOptions& opts) {
  RunningMoments2D acc;
  const double warmup_end = opts.warmup_fraction * opts.horizon;
  detail::run_sde(spec, opts, [&](double t, double x, double y, double, bool) {
    if (t > warmup_end) acc.add(x, y);
  });
  if (acc.weight() <= 0.0) throw InvalidParams("sde_stationary_moments: empty horizon");
  return {acc.mean_x(), acc.mean_y(), acc.var_x(), acc.var_y(), acc.cov_xy(),
          (1.0 - opts.warmup_fraction) * opts.horizon};
}

/// Symmetric 2x2 matrix.
struct SymMat2 {
  double xx = 0.0, xy = 0.0, yy = 0.0;
};

using Mat2 = std::array<std::array<double, 2>, 2>;

/// Unique stationary covariance of dZ = A Z dt + B dW: solves
/// A S + S A^T + BBt = 0 componentwise for 2x2 inputs. A must be Hurwitz
/// (trace < 0, det > 0).
inline SymMat2 lyapunov_stationary(const Mat2& a, const SymMat2& bbt) {
  const double tr = a[0][0] + a[1][1];
  const double det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
  if (!(tr < 0.0) || !(det > 0.0))
    throw InvalidParams("lyapunov_stationary: A is not a stable matrix");
  // Unknowns (Sxx, Sxy, Syy):
  //   2 a11 Sxx + 2 a12 Sxy                    = -Qxx
  //   a21 Sxx + (a11 + a22) Sxy + a12 Syy      = -Qxy
  //   2 a21 Sxy + 2 a22 Syy                    = -Qyy
  const double m[3][3] = {{2 * a[0][0], 2 * a[0][1], 0.0},
                          {a[1][0], a[0][0] + a[1][1], a[0][1]},
                          {0.0, 2 * a[1][0], 2 * a[1][1]}};
  const double rhs[3] = {-bbt.xx, -bbt.xy, -bbt.yy};
  const double d = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                   m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                   m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  if (d == 0.0) throw InvalidParams("lyapunov_stationary: singular system");
  const auto solve_col = [&](int col) {
    double t[3][3];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) t[i][j] = (j == col) ? rhs[i] : m[i][j];
    return (t[0][0] * (t[1][1] * t[2][2] - t[1][2] * t[2][1]) -
            t[0][1] * (t[1][0] * t[2][2] - t[1][2] * t[2][0]) +
            t[0][2] * (t[1][0] * t[2][1] - t[1][1] * t[2][0])) /
           d;
  };
  return {solve_col(0), solve_col(1), solve_col(2)};
}

/// Diffusion matrix BBt of the limit SDE.
inline SymMat2 noise_covariance_rate(const DiffusionSpec& s) {
  return {2.0 * (s.nu + s.mu), s.nu + 2.0 * s.mu, 2.0 * (s.nu + s.mu)};
}

/// First and second moments of a bivariate Gaussian restricted to a half
/// plane {x <= cut} (unnormalized: `mass` is the Gaussian measure of the
/// region and the e* fields are E[g(X,Y) 1{X <= cut}]).
struct RegionMoments {
  double mass = 0.0;
  double ex = 0.0, ey = 0.0;
  double exx = 0.0, exy = 0.0, eyy = 0.0;
};

inline RegionMoments gaussian_moments_below(double mean_x, double mean_y, const SymMat2& cov,
                                            double cut) {
  const double sx = std::sqrt(cov.xx);
  const double z = (cut - mean_x) / sx;
  const double mass = normal_cdf(z);
  const double pdf = normal_pdf(z);
  const double slope = cov.xy / cov.xx;  // E[Y|X=x] = mean_y + slope (x - mean_x)
  RegionMoments r;
  r.mass = mass;
  r.ex = mean_x * mass - sx * pdf;
  const double central_xx = cov.xx * (mass - z * pdf);  // E[(X-mx)^2 1]
  r.exx = central_xx + 2.0 * mean_x * r.ex - mean_x * mean_x * mass;
  r.ey = mean_y * mass - slope * sx * pdf;
  r.exy = mean_y * r.ex + slope * (r.exx - mean_x * r.ex);
  const double resid_var = cov.yy - slope * cov.xy;
  r.eyy = (resid_var + mean_y * mean_y) * mass + 2.0 * mean_y * slope * (r.ex - mean_x * mass) +
          slope * slope * central_xx;
  return r;
}

inline RegionMoments gaussian_moments_above(double mean_x, double mean_y, const SymMat2& cov,
                                            double cut) {
  const RegionMoments below = gaussian_moments_below(mean_x, mean_y, cov, cut);
  RegionMoments r;
  r.mass = 1.0 - below.mass;
  r.ex = mean_x - below.ex;
  r.ey = mean_y - below.ey;
  r.exx = mean_x * mean_x + cov.xx - below.exx;
  r.exy = mean_x * mean_y + cov.xy - below.exy;
  r.eyy = mean_y * mean_y + cov.yy - below.eyy;
  return r;
}

/// The explicit invariant density for kappa = +infinity:
///   phi(x,y) = c1 f-(x,y) 1{x <= beta} + c2 f+(x,y) 1{x > beta},
/// with f- centered at (0,0) and f+ at (-nu beta/mu, 0), and the covariance
/// matrices taken verbatim from the limit theorem. The constants c1, c2 are
/// pinned by two conditions: the first marginal is continuous at beta (it is
/// the stationary density of the autonomous one-dimensional piecewise
/// Ornstein-Uhlenbeck first component, whose regional variances are 1 and
/// (nu+mu)/mu), and the total mass is one.
class PiecewiseGaussianDensity {
 public:
  PiecewiseGaussianDensity(double beta, double nu, double mu) : beta_(beta), nu_(nu), mu_(mu) {
    if (!(nu > 0.0) || !(mu > 0.0))
      throw InvalidParams("PiecewiseGaussianDensity: rates must be > 0");
    if (!std::isfinite(beta)) throw InvalidParams("PiecewiseGaussianDensity: beta must be finite");
    mean_plus_x_ = -nu * beta / mu;
    cov_minus_ = {1.0, 2.0 / (nu + 2.0 * mu), (nu + mu) / mu};
    cov_plus_ = {(nu + mu) / mu, 1.0 / mu, (nu + mu) / mu};
    sd_plus_x_ = std::sqrt(cov_plus_.xx);
    // Continuity of the first marginal at beta plus unit mass fixes c1, c2.
    const double left_pdf = normal_pdf(beta);
    const double right_pdf = normal_pdf(beta, mean_plus_x_, sd_plus_x_);
    const double left_mass = normal_cdf(beta);
    const double right_mass = 1.0 - normal_cdf(beta, mean_plus_x_, sd_plus_x_);
    const double scale = 1.0 / (right_pdf * left_mass + left_pdf * right_mass);
    c1_ = right_pdf * scale;
    c2_ = left_pdf * scale;
  }

  double beta() const { return beta_; }
  double c1() const { return c1_; }
  double c2() const { return c2_; }
  double mean_plus_x() const { return mean_plus_x_; }
  const SymMat2& cov_minus() const { return cov_minus_; }
  const SymMat2& cov_plus() const { return cov_plus_; }

  double pdf(double x, double y) const {
    if (x <= beta_) return c1_ * gaussian2(x, y, 0.0, 0.0, cov_minus_);
    return c2_ * gaussian2(x, y, mean_plus_x_, 0.0, cov_plus_);
  }

  double marginal_x_pdf(double x) const {
    if (x <= beta_) return c1_ * normal_pdf(x);
    return c2_ * normal_pdf(x, mean_plus_x_, sd_plus_x_);
  }

  double marginal_x_cdf(double x) const {
    if (x <= beta_) return c1_ * normal_cdf(x);
    return c1_ * normal_cdf(beta_) +
           c2_ * (normal_cdf(x, mean_plus_x_, sd_plus_x_) -
                  normal_cdf(beta_, mean_plus_x_, sd_plus_x_));
  }

  /// Moments of the mixture (means, variances, covariance), assembled from
  /// closed-form half-plane Gaussian moments.
  SdeMoments moments() const {
    const RegionMoments lo = gaussian_moments_below(0.0, 0.0, cov_minus_, beta_);
    const RegionMoments hi = gaussian_moments_above(mean_plus_x_, 0.0, cov_plus_, beta_);
    const double ex = c1_ * lo.ex + c2_ * hi.ex;
    const double ey = c1_ * lo.ey + c2_ * hi.ey;
    const double exx = c1_ * lo.exx + c2_ * hi.exx;
    const double exy = c1_ * lo.exy + c2_ * hi.exy;
    const double eyy = c1_ * lo.eyy + c2_ * hi.eyy;
    return {ex, ey, exx - ex * ex, eyy - ey * ey, exy - ex * ey, 0.0};
  }

 private:
  static double gaussian2(double x, double y, double mx, double my, const SymMat2& cov) {
    const double det = cov.xx * cov.yy - cov.xy * cov.xy;
    const double dx = x - mx, dy = y - my;
    const double quad = (cov.yy * dx * dx - 2.0 * cov.xy * dx * dy + cov.xx * dy * dy) / det;
    return std::exp(-0.5 * quad) / (2.0 * std::numbers::pi * std::sqrt(det));
  }

  double beta_, nu_, mu_;
  double mean_plus_x_ = 0.0;
  double sd_plus_x_ = 1.0;
  SymMat2 cov_minus_, cov_plus_;
  double c1_ = 1.0, c2_ = 1.0;
};

inline PiecewiseGaussianDensity invariant_density(const DiffusionSpec& spec) {
  validate(spec);
  if (std::isfinite(spec.kappa))
    throw InvalidParams("invariant_density: explicit form requires kappa = +infinity");
  return PiecewiseGaussianDensity(spec.beta, spec.nu, spec.mu);
}

struct DiffusionSuccess {
  double value = 0.0;
  bool regime_warning = false;  // estimate fell outside [0,1]; not clamped
};

/// Maps stationary diffusion means back to the pre-limit scale and applies
/// the success ratio (E[Q]-E[U])/E[Q].
inline DiffusionSuccess diffusion_success_estimate(const ScalingRegime& r, double mean_u_hat,
                                                   double mean_q_hat) {
  validate(r.spec);
  if (r.n < 1) throw InvalidParams("diffusion_success_estimate: n must be >= 1");
  const double sqrt_n = std::sqrt(static_cast<double>(r.n));
  const double mean_u = center_uncharged(r) + sqrt_n * mean_u_hat;
  const double mean_q = center_total(r) + sqrt_n * mean_q_hat;
  DiffusionSuccess out;
  out.value = (mean_q - mean_u) / mean_q;
  out.regime_warning = !(out.value >= 0.0 && out.value <= 1.0);
  return out;
}

}  // namespace evlot
