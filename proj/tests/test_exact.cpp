#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "evlot/exact.hpp"
#include "evlot/rng.hpp"

using namespace evlot;
using Catch::Matchers::WithinAbs;

namespace {

// Test-side oracle: truncated Poisson occupancy law of the loss system.
std::vector<double> truncated_poisson(int spaces, double offered) {
  std::vector<double> w(spaces + 1);
  w[0] = 1.0;
  double z = 1.0;
  for (int q = 1; q <= spaces; ++q) {
    w[q] = w[q - 1] * offered / q;
    z += w[q];
  }
  for (double& v : w) v /= z;
  return w;
}

// Test-side oracle: Erlang B by direct long-double summation.
double erlang_b_direct(int servers, double offered) {
  long double term = 1.0L, sum = 1.0L;
  for (int k = 1; k <= servers; ++k) {
    term *= offered / k;
    sum += term;
  }
  return static_cast<double>(term / sum);
}

// Test-side oracle: mean of the infinite-lot uncharged count by a long fixed
// truncation of the birth-death products.
double infinite_lot_mean_direct(double lambda, double mu, double nu, double cap, int u_max) {
  long double w = 1.0L, sum = 1.0L, mean = 0.0L;
  for (int u = 1; u <= u_max; ++u) {
    const long double death = mu * u + nu * std::min<long double>(u, cap);
    w *= lambda / death;
    sum += w;
    mean += u * w;
  }
  return static_cast<double>(mean / sum);
}

}  // namespace

TEST_CASE("stationary distribution: single-space lot, hand-solved") {
  const auto d = stationary_distribution({1, 1, 1, 1, 1});
  REQUIRE(d.probs.size() == 3);
  CHECK_THAT(d.probs[0], WithinAbs(0.5, 1e-12));   // (0,0)
  CHECK_THAT(d.probs[1], WithinAbs(0.25, 1e-12));  // (0,1)
  CHECK_THAT(d.probs[2], WithinAbs(0.25, 1e-12));  // (1,1)
  CHECK(global_balance_residual(d) < 1e-13);
}

TEST_CASE("stationary distribution: empty-system limit") {
  const auto d = stationary_distribution({1e-8, 1, 1, 3, 1});
  CHECK(d.probs[0] > 1.0 - 1e-7);
}

TEST_CASE("stationary distribution: occupancy marginal is the loss law") {
  const auto d = stationary_distribution({1, 1, 1, 2, 2});
  const auto marginal = occupancy_marginal(d);
  CHECK_THAT(marginal[0], WithinAbs(0.4, 1e-12));
  CHECK_THAT(marginal[1], WithinAbs(0.4, 1e-12));
  CHECK_THAT(marginal[2], WithinAbs(0.2, 1e-12));

  // Insensitivity: the marginal ignores the power cap entirely.
  const ModelParams p{8, 1, 2, 10, 3};
  const auto m = occupancy_marginal(stationary_distribution(p));
  const auto oracle = truncated_poisson(10, 8.0);
  for (int q = 0; q <= 10; ++q) REQUIRE_THAT(m[q], WithinAbs(oracle[q], 1e-10));
  CHECK_THAT(metrics(stationary_distribution(p)).p_block, WithinAbs(erlang_b(10, 8.0), 1e-10));
}

TEST_CASE("metrics on the hand-solved lot") {
  const auto m = metrics(stationary_distribution({1, 1, 1, 1, 1}));
  CHECK_THAT(m.mean_total, WithinAbs(0.5, 1e-12));
  CHECK_THAT(m.mean_charged, WithinAbs(0.25, 1e-12));
  CHECK_THAT(m.mean_uncharged, WithinAbs(0.25, 1e-12));
  CHECK_THAT(m.success, WithinAbs(0.5, 1e-12));
  CHECK_THAT(m.p_block, WithinAbs(0.5, 1e-12));
}

TEST_CASE("metrics rejects a zero-occupancy distribution") {
  StationaryDistribution d{{1, 1, 1, 1, 1}, {1.0, 0.0, 0.0}};  // point mass on (0,0)
  CHECK_THROWS_AS(metrics(d), NumericalError);
}

TEST_CASE("uncapped-power lot has success nu/(mu+nu)") {
  const auto m = metrics(stationary_distribution({1, 1, 1, 2, 2}));
  CHECK_THAT(m.success, WithinAbs(0.5, 1e-12));
}

TEST_CASE("erlang_b recursion") {
  CHECK(erlang_b(0, 3.0) == 1.0);
  CHECK_THAT(erlang_b(1, 1.0), WithinAbs(0.5, 1e-15));
  CHECK_THAT(erlang_b(2, 1.0), WithinAbs(0.2, 1e-15));
  for (double a : {0.5, 1.0, 4.0, 20.0})
    for (int k : {1, 3, 10, 30})
      REQUIRE_THAT(erlang_b(k, a), WithinAbs(erlang_b_direct(k, a), 1e-13));
  CHECK_THROWS_AS(erlang_b(-1, 1.0), InvalidParams);
  CHECK_THROWS_AS(erlang_b(3, 0.0), InvalidParams);
}

TEST_CASE("infinite-lot uncharged law") {
  SECTION("uncapped power reduces to Poisson") {
    const auto r = erlang_a_variant(1, 1, 1, 1000.0);
    CHECK_THAT(r.mean, WithinAbs(0.5, 1e-9));
    CHECK_THAT(r.probs[0], WithinAbs(std::exp(-0.5), 1e-9));
  }
  SECTION("unit capacity has factorial products") {
    const auto r = erlang_a_variant(1, 1, 1, 1.0);
    const double z = std::numbers::e - 1.0;  // sum of 1/(u+1)!
    CHECK_THAT(r.mean, WithinAbs(1.0 / z, 1e-9));
    double factorial = 1.0;
    for (int u = 0; u <= 5; ++u) {
      factorial *= (u + 1);
      REQUIRE_THAT(r.probs[u], WithinAbs(1.0 / (factorial * z), 1e-12));
    }
  }
  SECTION("light traffic linearizes") {
    const auto r = erlang_a_variant(0.01, 1, 1, 2.0);
    CHECK_THAT(r.mean, WithinAbs(0.005, 1e-4));
    CHECK_THAT(r.mean, WithinAbs(infinite_lot_mean_direct(0.01, 1, 1, 2.0, 500), 1e-12));
  }
  SECTION("matches a long fixed truncation") {
    CHECK_THAT(erlang_a_variant(50, 1, 1, 10).mean,
               WithinAbs(infinite_lot_mean_direct(50, 1, 1, 10, 4000), 1e-10));
  }
  CHECK_THROWS_AS(erlang_a_variant(1, 1, 1, 1, 2.0), InvalidParams);
}

TEST_CASE("lower bound") {
  CHECK_THAT(lower_bound({1, 1, 1, 5, 1}), WithinAbs(1.0 - 1.0 / (std::numbers::e - 1.0), 1e-9));
  // Effectively unlimited power: the bound collapses to nu/(mu+nu).
  CHECK_THAT(lower_bound({1, 1, 3, 2000, 2000}), WithinAbs(0.75, 1e-9));
  const double lb = lower_bound({50, 1, 1, 100, 10});
  CHECK(lb > 0.0);
  CHECK(lb < 0.5);
  CHECK_THAT(lb, WithinAbs(1.0 - infinite_lot_mean_direct(50, 1, 1, 10, 4000) / 50.0, 1e-10));
}

TEST_CASE("upper bound: chain solve equals the collapsed closed form") {
  for (const ModelParams p : {ModelParams{1, 1, 1, 3, 1.5}, ModelParams{8, 1, 2, 6, 2},
                              ModelParams{5, 2, 1, 4, 4}}) {
    const double chain = upper_bound(p);
    REQUIRE_THAT(chain, WithinAbs(upper_bound_closed_form(p), 1e-10));
  }
  CHECK_THAT(upper_bound({1, 1, 1, 1, 1}),
             WithinAbs(metrics(stationary_distribution({1, 1, 1, 1, 1})).success, 1e-12));
  CHECK_THAT(upper_bound({5, 1, 3, 4, 2}), WithinAbs(0.75, 1e-10));
}

TEST_CASE("bounds sandwich the exact success probability") {
  SECTION("single-space lot") {
    const auto b = bounds({1, 1, 1, 1, 1});
    CHECK_THAT(b.lower, WithinAbs(0.4180232931, 1e-9));
    CHECK_THAT(b.upper, WithinAbs(0.5, 1e-12));
    const double exact = metrics(stationary_distribution({1, 1, 1, 1, 1})).success;
    CHECK(b.lower <= exact);
    CHECK(exact <= b.upper);
  }
  SECTION("uncapped power makes the upper bound exact") {
    const ModelParams p{8, 1, 1, 10, 10};
    const auto b = bounds(p);
    CHECK_THAT(b.upper, WithinAbs(0.5, 1e-10));
    CHECK_THAT(metrics(stationary_distribution(p)).success, WithinAbs(b.upper, 1e-10));
  }
  SECTION("random small lots") {
    RngStream rng(1234, 0);
    for (int trial = 0; trial < 15; ++trial) {
      ModelParams p;
      p.spaces = 2 + static_cast<int>(rng.u01() * 7);
      p.arrival_rate = (0.3 + 1.4 * rng.u01()) * p.spaces;
      p.parking_rate = 0.5 + rng.u01();
      p.charging_rate = 0.3 + 2.0 * rng.u01();
      p.power_cap = 0.1 + (p.spaces - 0.1) * rng.u01();
      const auto b = bounds(p);
      const double exact = metrics(stationary_distribution(p)).success;
      REQUIRE(b.lower <= exact + 1e-9);
      REQUIRE(exact <= b.upper + 1e-9);
    }
  }
}

TEST_CASE("uncapped-power product form") {
  SECTION("single space, hand values") {
    const auto d = joint_km_decomposition({1, 1, 1, 1, 1});
    CHECK_THAT(d.probs[0], WithinAbs(0.5, 1e-14));
    CHECK_THAT(d.probs[1], WithinAbs(0.25, 1e-14));
    CHECK_THAT(d.probs[2], WithinAbs(0.25, 1e-14));
  }
  SECTION("instant charging concentrates on charged rows") {
    const auto d = joint_km_decomposition({1, 1, 1e6, 3, 3});
    double uncharged_mass = 0.0;
    const auto states = enumerate_states(3);
    for (std::size_t i = 0; i < states.size(); ++i)
      if (states[i].uncharged > 0) uncharged_mass += d.probs[i];
    CHECK(uncharged_mass < 1e-5);
  }
  SECTION("matches the chain solve elementwise") {
    for (const ModelParams p : {ModelParams{1, 1, 1, 2, 2}, ModelParams{8, 1, 2, 7, 7},
                                ModelParams{20, 2, 1, 12, 12}}) {
      const auto product = joint_km_decomposition(p);
      const auto solved = stationary_distribution(p);
      for (std::size_t i = 0; i < product.probs.size(); ++i)
        REQUIRE_THAT(product.probs[i], WithinAbs(solved.probs[i], 1e-10));
    }
  }
  CHECK_THROWS_AS(joint_km_decomposition({1, 1, 1, 3, 2}), InvalidParams);
}

TEST_CASE("flow conservation: charging completions balance charged departures") {
  for (const ModelParams p : {ModelParams{8, 1, 2, 10, 3}, ModelParams{3, 0.7, 1.3, 6, 2.5},
                              ModelParams{60, 1, 1, 50, 10}}) {
    const auto d = stationary_distribution(p);
    const auto m = metrics(d);
    REQUIRE_THAT(p.charging_rate * mean_power_drawn(d),
                 WithinAbs(p.parking_rate * m.mean_charged, 1e-10));
  }
}

TEST_CASE("success is nondecreasing in the power cap") {
  double prev = -1.0;
  for (int i = 1; i <= 20; ++i) {
    const double cap = 0.5 * i;
    const double s = metrics(stationary_distribution({12, 1, 1, 10, cap})).success;
    REQUIRE(s >= prev - 1e-12);
    prev = s;
  }
}

TEST_CASE("iterative solver agrees with the direct one") {
  const ModelParams p{25, 1, 1, 30, 7.5};
  SolveOptions direct;
  direct.method = SolveOptions::Method::direct;
  SolveOptions iterative;
  iterative.method = SolveOptions::Method::gauss_seidel;
  const auto a = stationary_distribution(p, direct);
  const auto b = stationary_distribution(p, iterative);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.probs.size(); ++i)
    worst = std::max(worst, std::abs(a.probs[i] - b.probs[i]));
  CHECK(worst < 1e-10);
  CHECK(global_balance_residual(b) < 1e-10);
}

TEST_CASE("solver state limit") {
  SolveOptions opts;
  opts.max_states = 100;
  CHECK_THROWS_AS(stationary_distribution({1, 1, 1, 50, 10}, opts), SolverError);
}
