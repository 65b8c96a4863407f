#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "evlot/fluid.hpp"

using namespace evlot;
using Catch::Matchers::WithinAbs;

namespace {

DistributionSpec exp_sampler(double rate) {
  return DistributionSpec::sampler(1.0 / rate,
                                   [rate](double u) { return -std::log1p(-u) / rate; });
}

}  // namespace

TEST_CASE("expected_min closed forms and quadrature") {
  const auto e1 = DistributionSpec::exponential(1.0);
  SECTION("two unit exponentials") {
    CHECK_THAT(expected_min(e1, e1, 1.0), WithinAbs(0.5, 1e-14));
  }
  SECTION("slowdown 2, closed form vs quadrature") {
    CHECK_THAT(expected_min(e1, e1, 2.0), WithinAbs(2.0 / 3.0, 1e-14));
    const double quad = detail::expected_min_quadrature(e1, e1, 2.0, 1e-10);
    CHECK_THAT(quad, WithinAbs(2.0 / 3.0, 1e-10));
  }
  SECTION("deterministic pair") {
    CHECK_THAT(expected_min(DistributionSpec::deterministic(1.0),
                            DistributionSpec::deterministic(2.0), 1.0),
               WithinAbs(1.0, 1e-12));
    CHECK_THAT(expected_min(DistributionSpec::deterministic(3.0),
                            DistributionSpec::deterministic(1.0), 2.0),
               WithinAbs(2.0, 1e-12));
  }
  SECTION("exponential vs deterministic, hand integrals") {
    // E[min{Exp(1), 2}] = 1 - e^{-2}
    CHECK_THAT(expected_min(e1, DistributionSpec::deterministic(2.0), 1.0),
               WithinAbs(1.0 - std::exp(-2.0), 1e-10));
    // E[min{1, 2 Exp(1)}] = integral_0^1 e^{-t/2} dt = 2(1 - e^{-1/2})
    CHECK_THAT(expected_min(DistributionSpec::deterministic(1.0), e1, 2.0),
               WithinAbs(2.0 * (1.0 - std::exp(-0.5)), 1e-10));
  }
  SECTION("sampler path uses Monte Carlo with a seedable stream") {
    const auto s = exp_sampler(1.0);
    const double v1 = expected_min(s, e1, 1.0);
    const double v2 = expected_min(s, e1, 1.0);
    CHECK(v1 == v2);  // deterministic per seed
    CHECK_THAT(v1, WithinAbs(0.5, 5e-3));
    FluidOptions strict;
    strict.mc_samples = 64;
    strict.mc_ci_tolerance = 1e-7;
    CHECK_THROWS_AS(expected_min(s, e1, 1.0, strict), NumericalError);
  }
  CHECK_THROWS_AS(expected_min(e1, e1, 0.5), InvalidParams);
}

TEST_CASE("success probability under a slowdown") {
  const auto e_mu = DistributionSpec::exponential(1.0);
  const auto e_nu = DistributionSpec::exponential(2.0);
  SECTION("exponential closed form vs quadrature") {
    // P(E_mu > c E_nu) = nu / (nu + c mu)
    const double closed = success_given_slowdown(e_mu, e_nu, 3.0);
    CHECK_THAT(closed, WithinAbs(2.0 / 5.0, 1e-14));
    boost::math::quadrature::exp_sinh<double> integrator;
    const double quad = integrator.integrate(
        [](double t) { return 2.0 * std::exp(-2.0 * t) * std::exp(-3.0 * t); }, 1e-12);
    CHECK_THAT(closed, WithinAbs(quad, 1e-10));
  }
  SECTION("deterministic requirements") {
    CHECK_THAT(success_given_slowdown(e_mu, DistributionSpec::deterministic(0.5), 2.0),
               WithinAbs(std::exp(-1.0), 1e-12));
    CHECK(success_given_slowdown(DistributionSpec::deterministic(1.0),
                                 DistributionSpec::deterministic(2.0), 1.0) == 0.0);
    CHECK(success_given_slowdown(DistributionSpec::deterministic(3.0),
                                 DistributionSpec::deterministic(1.0), 2.0) == 1.0);
  }
}

TEST_CASE("fluid fixed point, blocking prefactor") {
  SECTION("underloaded hand example") {
    const FluidSolution s = fluid_fixed_point({1, 1, 1, 2, 1});
    CHECK_THAT(s.p_block, WithinAbs(0.2, 1e-14));
    CHECK_THAT(s.u_star, WithinAbs(0.4, 1e-14));
    CHECK(s.regime == FluidRegime::underloaded);
    CHECK_THAT(s.p_s, WithinAbs(0.5, 1e-14));
  }
  SECTION("overloaded hand example") {
    const FluidSolution s = fluid_fixed_point({10, 1, 1, 2, 0.5});
    CHECK_THAT(s.p_block, WithinAbs(100.0 / 122.0, 1e-12));
    CHECK_THAT(s.u_star, WithinAbs(159.0 / 122.0, 1e-12));
    CHECK(s.regime == FluidRegime::overloaded);
    CHECK_THAT(s.p_s, WithinAbs(0.5 * 122.0 / 220.0, 1e-12));
  }
  SECTION("full-power lot stays underloaded whenever the candidate fits") {
    const FluidSolution s = fluid_fixed_point({3, 1, 1, 4, 4});
    const double admitted = 3.0 * (1.0 - erlang_b(4, 3.0));
    CHECK_THAT(s.u_star, WithinAbs(admitted / 2.0, 1e-12));
    CHECK(s.regime == FluidRegime::underloaded);
  }
}

TEST_CASE("fluid fixed point, limit-theorem prefactor") {
  SECTION("hand example") {
    const FluidSolution s = fluid_fixed_point_raw({1, 1, 1, 2, 1});
    CHECK_THAT(s.u_star, WithinAbs(0.5, 1e-14));
    CHECK(s.regime == FluidRegime::underloaded);
  }
  SECTION("space-capped prefactor") {
    const FluidSolution s = fluid_fixed_point_raw({10, 1, 1, 2, 2});
    CHECK_THAT(s.u_star, WithinAbs(1.0, 1e-14));
    CHECK(s.regime == FluidRegime::underloaded);
  }
  SECTION("unconstrained lot") {
    const FluidSolution s = fluid_fixed_point_raw({2, 1, 1, 5, 5});
    CHECK_THAT(s.u_star, WithinAbs(1.0, 1e-14));
  }
}

TEST_CASE("fluid success probability") {
  CHECK_THAT(fluid_success({1, 1, 1, 2, 1}), WithinAbs(0.5, 1e-14));
  CHECK_THAT(fluid_success({10, 1, 1, 2, 0.5}), WithinAbs(0.2772727272727273, 1e-12));
  // Instant charging drives success to one while staying underloaded.
  CHECK_THAT(fluid_success({1, 1, 1e6, 2, 1}), WithinAbs(1.0, 1e-5));
}

TEST_CASE("general fixed point specializes to the exponential closed form") {
  const FluidOptions opts;
  for (const ModelParams p : {ModelParams{1, 1, 1, 2, 1}, ModelParams{10, 1, 1, 2, 0.5},
                              ModelParams{40, 1, 1, 50, 5}, ModelParams{60, 1, 1, 50, 45}}) {
    const FluidSolution closed = fluid_fixed_point(p);
    const FluidSolution general = general_fluid_fixed_point(
        p.arrival_rate, p.spaces, p.power_cap, DistributionSpec::exponential(p.parking_rate),
        DistributionSpec::exponential(p.charging_rate), opts);
    REQUIRE_THAT(general.u_star, WithinAbs(closed.u_star, 1e-9));
    REQUIRE_THAT(general.p_s, WithinAbs(closed.p_s, 1e-9));
    REQUIRE(general.regime == closed.regime);
  }
}

TEST_CASE("general fixed point with deterministic laws") {
  SECTION("charging always finishes early") {
    const FluidSolution s = general_fluid_fixed_point(1.0, 50, 40.0,
                                                      DistributionSpec::deterministic(1.0),
                                                      DistributionSpec::deterministic(0.5));
    CHECK_THAT(s.u_star, WithinAbs(0.5 * (1.0 - s.p_block), 1e-9));
    CHECK_THAT(s.p_s, WithinAbs(1.0, 1e-12));
  }
  SECTION("requirement exceeds the stay surely") {
    const FluidSolution s = general_fluid_fixed_point(1.5, 3, 1.0,
                                                      DistributionSpec::deterministic(1.0),
                                                      DistributionSpec::deterministic(2.0));
    // min{B, c D} = B almost surely, so u* saturates the admitted mass.
    CHECK_THAT(s.u_star, WithinAbs(1.5 * (1.0 - s.p_block), 1e-9));
    CHECK(s.p_s == 0.0);
  }
}

TEST_CASE("fixed-point equation has exactly one crossing") {
  for (const ModelParams p : {ModelParams{10, 1, 1, 2, 0.5}, ModelParams{3, 1, 2, 5, 1}}) {
    const double p_block = erlang_b(p.spaces, p.arrival_rate / p.parking_rate);
    const double admitted = p.arrival_rate * (1.0 - p_block);
    const auto b = DistributionSpec::exponential(p.parking_rate);
    const auto d = DistributionSpec::exponential(p.charging_rate);
    int sign_changes = 0;
    double prev = admitted * expected_min(b, d, 1.0);  // g(0) > 0
    const double hi = admitted * b.mean();
    for (int i = 1; i <= 400; ++i) {
      const double u = hi * i / 400.0;
      const double g = admitted * expected_min(b, d, std::max(1.0, u / p.power_cap)) - u;
      if ((g < 0.0) != (prev < 0.0)) ++sign_changes;
      prev = g;
    }
    REQUIRE(sign_changes == 1);
  }
}

TEST_CASE("success is continuous across the regime kink") {
  // The kink sits where lambda (1-P_K)/(mu+nu) = M.
  const ModelParams base{10, 1, 1, 10, 1};
  const double admitted = 10.0 * (1.0 - erlang_b(10, 10.0));
  const double kink = admitted / 2.0;
  double prev_ps = 0.0;
  bool first = true;
  for (double cap = kink - 1e-6; cap <= kink + 1e-6; cap += 1e-7) {
    ModelParams p = base;
    p.power_cap = cap;
    const FluidSolution s = fluid_fixed_point(p);
    if (!first) REQUIRE_THAT(s.p_s, WithinAbs(prev_ps, 1e-6));
    prev_ps = s.p_s;
    first = false;
  }
  ModelParams at = base;
  at.power_cap = kink;
  CHECK_THAT(fluid_fixed_point(at).p_s, WithinAbs(0.5, 1e-9));
}

TEST_CASE("general path rejects bad inputs") {
  const auto e1 = DistributionSpec::exponential(1.0);
  CHECK_THROWS_AS(general_fluid_fixed_point(0.0, 2, 1.0, e1, e1), InvalidParams);
  CHECK_THROWS_AS(general_fluid_fixed_point(1.0, 0, 1.0, e1, e1), InvalidParams);
  CHECK_THROWS_AS(general_fluid_fixed_point(1.0, 2, 3.0, e1, e1), InvalidParams);
  CHECK_THROWS_AS(DistributionSpec::exponential(-1.0), InvalidParams);
  CHECK_THROWS_AS(DistributionSpec::deterministic(0.0), InvalidParams);
  CHECK_THROWS_AS(DistributionSpec::sampler(1.0, nullptr), InvalidParams);
}
