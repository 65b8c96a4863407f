#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "evlot/stats.hpp"

using namespace evlot;

TEST_CASE("student t quantiles match tables") {
  CHECK_THAT(student_t_quantile(4, 0.975), Catch::Matchers::WithinAbs(2.7764451052, 1e-8));
  CHECK_THAT(student_t_quantile(9, 0.995), Catch::Matchers::WithinAbs(3.2498355416, 1e-8));
  CHECK_THAT(student_t_quantile(1, 0.975), Catch::Matchers::WithinAbs(12.7062047364, 1e-7));
}

TEST_CASE("normal helpers") {
  CHECK_THAT(normal_cdf(0.0), Catch::Matchers::WithinAbs(0.5, 1e-15));
  CHECK_THAT(normal_cdf(1.96), Catch::Matchers::WithinAbs(0.9750021048517795, 1e-12));
  CHECK_THAT(normal_quantile(0.975), Catch::Matchers::WithinAbs(1.9599639845400545, 1e-9));
  CHECK_THAT(normal_pdf(0.0), Catch::Matchers::WithinAbs(0.3989422804014327, 1e-14));
  CHECK_THAT(normal_pdf(1.0, 1.0, 2.0), Catch::Matchers::WithinAbs(0.19947114020071635, 1e-14));
}

TEST_CASE("mean confidence interval, hand-computed") {
  const std::vector<double> xs{1, 2, 3, 4, 5};
  const EstimateWithCI e = mean_confidence_interval(xs, 0.95);
  CHECK_THAT(e.value, Catch::Matchers::WithinAbs(3.0, 1e-12));
  // sd = sqrt(2.5), hw = t_{.975,4} * sd / sqrt(5)
  CHECK_THAT(e.half_width, Catch::Matchers::WithinAbs(2.7764451052 * std::sqrt(2.5 / 5.0), 1e-8));
  CHECK(e.sample_count == 5);
  CHECK(e.method == "replications");
  CHECK(e.covers(3.5));
  CHECK_FALSE(e.covers(5.5));
}

TEST_CASE("interval overlap") {
  EstimateWithCI a{0.5, 0.1, 0.95, 5, "replications"};
  EstimateWithCI b{0.65, 0.06, 0.95, 5, "replications"};
  EstimateWithCI c{0.8, 0.05, 0.95, 5, "replications"};
  CHECK(a.overlaps(b));
  CHECK(b.overlaps(a));
  CHECK_FALSE(a.overlaps(c));
}

TEST_CASE("ks statistic, hand-computed") {
  const std::vector<double> xs{0.9, 0.1, 0.5};  // sorted internally
  const double d = ks_statistic(xs, [](double x) { return x; });
  CHECK_THAT(d, Catch::Matchers::WithinAbs(7.0 / 30.0, 1e-12));
}

TEST_CASE("running moments") {
  RunningMoments2D m;
  m.add(1.0, 2.0);
  m.add(3.0, 6.0);
  m.add(5.0, 10.0);
  CHECK_THAT(m.mean_x(), Catch::Matchers::WithinAbs(3.0, 1e-12));
  CHECK_THAT(m.mean_y(), Catch::Matchers::WithinAbs(6.0, 1e-12));
  CHECK_THAT(m.var_x(), Catch::Matchers::WithinAbs(8.0 / 3.0, 1e-12));
  CHECK_THAT(m.cov_xy(), Catch::Matchers::WithinAbs(16.0 / 3.0, 1e-12));
}

TEST_CASE("degenerate inputs rejected") {
  CHECK_THROWS_AS(mean_confidence_interval({}, 0.95), InvalidParams);
  CHECK_THROWS_AS(ks_statistic({}, [](double) { return 0.0; }), InvalidParams);
}
