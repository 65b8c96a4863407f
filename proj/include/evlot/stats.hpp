#pragma once

// Small statistics toolbox shared by the simulators and the test oracles:
// confidence intervals from replication or batch means, Kolmogorov-Smirnov
// distances against a reference CDF, and Gaussian helpers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "evlot/errors.hpp"

namespace evlot {

/// Point estimate with a symmetric confidence interval and provenance.
struct EstimateWithCI {
  double value = 0.0;
  double half_width = 0.0;
  double confidence = 0.95;
  int sample_count = 0;       // replications or batches behind the interval
  std::string method;         // "replications" or "batch-means"

  double lower() const { return value - half_width; }
  double upper() const { return value + half_width; }
  bool covers(double x) const { return lower() <= x && x <= upper(); }
  bool overlaps(const EstimateWithCI& other) const {
    return lower() <= other.upper() && other.lower() <= upper();
  }
};

inline double student_t_quantile(double dof, double p) {
  boost::math::students_t dist(dof);
  return boost::math::quantile(dist, p);
}

inline double normal_pdf(double x, double mean = 0.0, double sd = 1.0) {
  const double z = (x - mean) / sd;
  return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

inline double normal_cdf(double x, double mean = 0.0, double sd = 1.0) {
  return 0.5 * std::erfc(-(x - mean) / (sd * std::sqrt(2.0)));
}

inline double normal_quantile(double p) {
  boost::math::normal dist;
  return boost::math::quantile(dist, p);
}

/// t-interval over independent per-replication (or per-batch) means.
inline EstimateWithCI mean_confidence_interval(std::span<const double> values,
                                               double confidence,
                                               std::string method = "replications") {
  const int n = static_cast<int>(values.size());
  if (n < 1) throw InvalidParams("mean_confidence_interval: no samples");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  EstimateWithCI out;
  out.value = mean;
  out.confidence = confidence;
  out.sample_count = n;
  out.method = std::move(method);
  if (n == 1) {
    out.half_width = 0.0;  // degenerate; caller sees sample_count == 1
    return out;
  }
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1));
  const double t = student_t_quantile(n - 1, 0.5 + confidence / 2.0);
  out.half_width = t * sd / std::sqrt(static_cast<double>(n));
  return out;
}

/// Two-sided KS distance between a sample and a reference CDF.
/// The sample is copied and sorted internally.
inline double ks_statistic(std::span<const double> sample,
                           const std::function<double(double)>& cdf) {
  if (sample.empty()) throw InvalidParams("ks_statistic: empty sample");
  std::vector<double> xs(sample.begin(), sample.end());
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i + 1) / n));
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
  }
  return d;
}

/// Streaming first/second moments for one variable.
class RunningMoments {
 public:
  void add(double x, double weight = 1.0) {
    w_ += weight;
    sx_ += weight * x;
    sxx_ += weight * x * x;
  }
  double weight() const { return w_; }
  double mean() const { return sx_ / w_; }
  double variance() const { return sxx_ / w_ - mean() * mean(); }

 private:
  double w_ = 0.0, sx_ = 0.0, sxx_ = 0.0;
};

/// Streaming moments for a pair (means, variances, covariance).
class RunningMoments2D {
 public:
  void add(double x, double y, double weight = 1.0) {
    w_ += weight;
    sx_ += weight * x;
    sy_ += weight * y;
    sxx_ += weight * x * x;
    syy_ += weight * y * y;
    sxy_ += weight * x * y;
  }
  double weight() const { return w_; }
  double mean_x() const { return sx_ / w_; }
  double mean_y() const { return sy_ / w_; }
  double var_x() const { return sxx_ / w_ - mean_x() * mean_x(); }
  double var_y() const { return syy_ / w_ - mean_y() * mean_y(); }
  double cov_xy() const { return sxy_ / w_ - mean_x() * mean_y(); }

 private:
  double w_ = 0.0, sx_ = 0.0, sy_ = 0.0, sxx_ = 0.0, syy_ = 0.0, sxy_ = 0.0;
};

}  // namespace evlot
