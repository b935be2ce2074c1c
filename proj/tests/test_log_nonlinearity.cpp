#include <doctest.h>

#include <cmath>
#include <random>

#include "mfglab/log_nonlinearity.hpp"
#include "test_oracles.hpp"

using namespace mfglab;
using oracles::kTwoPi;

TEST_CASE("g_eps pointwise values and domain") {
  GridSpec g(1, 64, 1, 1.0);
  ScalarField ones(g, 1.0);
  ScalarField ge = g_eps(ones, 0.0);
  for (std::size_t i = 0; i < ge.size(); ++i) CHECK(ge[i] == 0.0);

  ScalarField shifted(g, std::exp(1.0) - 0.5);
  ScalarField ge2 = g_eps(shifted, 0.5);
  for (std::size_t i = 0; i < ge2.size(); ++i) CHECK(ge2[i] == doctest::Approx(1.0));

  CHECK_THROWS_AS(g_eps(ScalarField(g, 0.0), 0.0), PositivityError);
}

TEST_CASE("g_eps monotone in eps and in m") {
  std::mt19937_64 rng(3);
  GridSpec g(1, 32, 1, 1.0);
  ScalarField base = oracles::random_smooth_field(g, rng, 0.3);
  for (std::size_t i = 0; i < base.size(); ++i) base[i] += 1.5;
  ScalarField lo = g_eps(base, 0.1), hi = g_eps(base, 0.3);
  for (std::size_t i = 0; i < base.size(); ++i) CHECK(hi[i] >= lo[i]);
  ScalarField bumped = base;
  for (std::size_t i = 0; i < base.size(); ++i) bumped[i] += 0.2;
  ScalarField up = g_eps(bumped, 0.1);
  for (std::size_t i = 0; i < base.size(); ++i) CHECK(up[i] >= lo[i]);
}

TEST_CASE("g norm over time levels") {
  GridSpec g1(1, 32, 2, 1.0);
  CHECK(g_norm_linf_lp(FieldTrajectory(g1, ScalarField(g1, 1.0)), 0.0, 2.0) == 0.0);
  CHECK(g_norm_linf_lp(FieldTrajectory(g1, ScalarField(g1, std::exp(1.0) - 0.5)), 0.5, 3.0) ==
        doctest::Approx(1.0).epsilon(1e-12));

  GridSpec g2(1, 32, 1, 1.0);
  std::vector<ScalarField> frames{ScalarField(g2, 1.0), ScalarField(g2, std::exp(1.0))};
  CHECK(g_norm_linf_lp(FieldTrajectory(g2, frames), 0.0, 1.0) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("inverse mass quadrature") {
  GridSpec g(1, 256, 1, 1.0);
  CHECK(inverse_mass(ScalarField(g, 1.0), 0.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(inverse_mass(ScalarField(g, 0.0), 0.1) == doctest::Approx(10.0).epsilon(1e-12));
  ScalarField m(g);
  for (std::size_t i = 0; i < g.cells(); ++i) m[i] = 1.0 + 0.5 * std::cos(kTwoPi * g.point(i)[0]);
  // int dx/(1 + a cos) = 1/sqrt(1-a^2), a = 1/2
  CHECK(inverse_mass(m, 0.0) == doctest::Approx(1.1547005383792515).epsilon(1e-10));
}

TEST_CASE("concavity threshold") {
  CHECK(concavity_threshold(1.0) == doctest::Approx(1.0));
  CHECK(concavity_threshold(2.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK_THROWS_AS(concavity_threshold(0.0), MfgError);

  // the second derivative p (ln z)^(p-2) z^-2 (p-1-ln z) of (ln z)^p changes
  // sign at z = e^(p-1); locate the sign change of the second difference
  double p = 2.0;
  auto second_diff = [&](double z) {
    double d = 1e-4;
    auto f = [&](double y) { return std::pow(std::log(y), p); };
    return (f(z + d) - 2.0 * f(z) + f(z - d)) / (d * d);
  };
  double lo = 2.0, hi = 3.5;
  REQUIRE(second_diff(lo) > 0.0);
  REQUIRE(second_diff(hi) < 0.0);
  for (int i = 0; i < 60; ++i) {
    double mid = 0.5 * (lo + hi);
    (second_diff(mid) > 0.0 ? lo : hi) = mid;
  }
  CHECK(0.5 * (lo + hi) == doctest::Approx(1.0 / concavity_threshold(p)).epsilon(1e-3));
}

TEST_CASE("log integrability split") {
  GridSpec g(1, 4096, 1, 1.0);
  auto rows_ones = log_integrability(FieldTrajectory(g, ScalarField(g, 1.0)), 0.0, 1.0);
  CHECK(rows_ones[0].total == 0.0);
  CHECK(rows_ones[0].low == 0.0);
  CHECK(rows_ones[0].high == 0.0);

  auto rows_e = log_integrability(FieldTrajectory(g, ScalarField(g, std::exp(1.0))), 0.0, 2.0);
  CHECK(rows_e[0].total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rows_e[0].low == 0.0);
  CHECK(rows_e[0].high == doctest::Approx(1.0).epsilon(1e-12));

  ScalarField m(g);
  for (std::size_t i = 0; i < g.cells(); ++i) m[i] = 1.0 + 0.5 * std::cos(kTwoPi * g.point(i)[0]);
  auto rows = log_integrability(FieldTrajectory(g, m), 0.0, 1.0);
  // frozen values from high-resolution quadrature of |ln(1+cos(2 pi x)/2)|
  CHECK(rows[0].total == doctest::Approx(0.33850977844057784).epsilon(2e-5));
  CHECK(rows[0].low == doctest::Approx(0.20392312131782588).epsilon(2e-5));
  CHECK(rows[0].high == doctest::Approx(0.13458665712275197).epsilon(2e-5));
  CHECK(rows[0].total == rows[0].low + rows[0].high);  // exact split

  // in-test dense oracle agrees with the frozen constant
  double dense = oracles::quad01(
      [](double x) { return std::abs(std::log(1.0 + 0.5 * std::cos(kTwoPi * x))); });
  CHECK(dense == doctest::Approx(0.33850977844057784).epsilon(1e-7));
}

TEST_CASE("eps schedule invariants") {
  CHECK_NOTHROW(EpsSchedule({1e-1, 1e-2, 1e-3}));
  CHECK_THROWS_AS(EpsSchedule({}), MfgError);
  CHECK_THROWS_AS(EpsSchedule({1e-2, 1e-1}), MfgError);
  CHECK_THROWS_AS(EpsSchedule({1e-1, 1e-1}), MfgError);
  CHECK_THROWS_AS(EpsSchedule({1e-1, 0.0}), MfgError);
}
