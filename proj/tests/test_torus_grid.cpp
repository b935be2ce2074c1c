#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "mfglab/field_io.hpp"
#include "mfglab/torus_grid.hpp"
#include "test_oracles.hpp"

using namespace mfglab;
using oracles::kTwoPi;

namespace {

ScalarField sample_1d(const GridSpec& g, double (*f)(double)) {
  ScalarField out(g);
  for (std::size_t i = 0; i < g.cells(); ++i) out[i] = f(g.point(i)[0]);
  return out;
}

double sin1(double x) { return std::sin(kTwoPi * x); }
double cos1(double x) { return std::cos(kTwoPi * x); }

}  // namespace

TEST_CASE("grid spec invariants") {
  GridSpec g(1, 64, 100, 0.5);
  CHECK(g.h() * g.n == 1.0);
  CHECK(g.dt() * g.nt == g.T);
  CHECK(g.cells() == 64);
  CHECK(GridSpec(2, 8, 4, 1.0).cells() == 64);

  CHECK_THROWS_AS(GridSpec(3, 8, 1, 1.0), MfgError);
  CHECK_THROWS_AS(GridSpec(1, 2, 1, 1.0), MfgError);
  CHECK_THROWS_AS(GridSpec(1, 8, 0, 1.0), MfgError);
  CHECK_THROWS_AS(GridSpec(1, 49, 1, 1.0), MfgError);  // h*n != 1 in doubles
}

TEST_CASE("gradient annihilates constants exactly") {
  GridSpec g(1, 64, 1, 1.0);
  VectorField grad = gradient_central(ScalarField(g, 3.25));
  for (double v : grad.comp[0]) CHECK(v == 0.0);
  ScalarField lap = laplacian(ScalarField(g, -7.5));
  for (std::size_t i = 0; i < lap.size(); ++i) CHECK(lap[i] == 0.0);
}

TEST_CASE("central gradient is second order on sin") {
  double errs[2];
  int idx = 0;
  for (int n : {256, 512}) {
    GridSpec g(1, n, 1, 1.0);
    VectorField grad = gradient_central(sample_1d(g, sin1));
    double err = 0.0;
    for (std::size_t i = 0; i < g.cells(); ++i)
      err = std::max(err, std::abs(grad.comp[0][i] - kTwoPi * cos1(g.point(i)[0])));
    errs[idx++] = err;
  }
  CHECK(errs[0] / errs[1] > 3.5);  // ~4x per halving
  CHECK(errs[0] < 6.28 * (1.0 / 256) * (1.0 / 256) * 50);
}

TEST_CASE("upwind pair brackets the derivative to first order") {
  GridSpec g(1, 128, 1, 1.0);
  UpwindPair uw = gradient_upwind_pair(sample_1d(g, cos1));
  double h = g.h();
  for (std::size_t i = 0; i < g.cells(); ++i) {
    double exact = -kTwoPi * std::sin(kTwoPi * g.point(i)[0]);
    CHECK(std::abs(uw.forward.comp[0][i] - exact) < kTwoPi * kTwoPi * h);
    CHECK(std::abs(uw.backward.comp[0][i] - exact) < kTwoPi * kTwoPi * h);
    double central = 0.5 * (uw.forward.comp[0][i] + uw.backward.comp[0][i]);
    CHECK(std::abs(central - exact) < 45.0 * h * h);  // (2 pi)^3/6 ~ 41.3
  }
}

TEST_CASE("laplacian eigenfunction accuracy and refinement") {
  double errs[2];
  int idx = 0;
  for (int n : {128, 256}) {
    GridSpec g(1, n, 1, 1.0);
    ScalarField lap = laplacian(sample_1d(g, sin1));
    double err = 0.0;
    for (std::size_t i = 0; i < g.cells(); ++i)
      err = std::max(err,
                     std::abs(lap[i] + kTwoPi * kTwoPi * std::sin(kTwoPi * g.point(i)[0])));
    errs[idx++] = err;
  }
  CHECK(errs[0] / errs[1] > 3.5);
}

TEST_CASE("2-d separable laplacian eigenfunction") {
  GridSpec g(2, 64, 1, 1.0);
  ScalarField f(g);
  for (std::size_t i = 0; i < g.cells(); ++i) {
    auto x = g.point(i);
    f[i] = std::sin(kTwoPi * x[0]) * std::sin(kTwoPi * x[1]);
  }
  ScalarField lap = laplacian(f);
  double err = 0.0;
  for (std::size_t i = 0; i < g.cells(); ++i)
    err = std::max(err, std::abs(lap[i] + 2.0 * kTwoPi * kTwoPi * f[i]));
  CHECK(err < 2.0 * kTwoPi * kTwoPi * 4.0 * std::pow(kTwoPi / 64, 2));
}

TEST_CASE("laplacian sums to zero by periodic telescoping") {
  std::mt19937_64 rng(7);
  for (int d : {1, 2}) {
    GridSpec g(d, 32, 1, 1.0);
    ScalarField f = oracles::random_smooth_field(g, rng);
    CHECK(std::abs(integrate(laplacian(f))) < 1e-11);
  }
}

TEST_CASE("quadrature basics") {
  GridSpec g(1, 64, 1, 1.0);
  CHECK(integrate(ScalarField(g, 1.0)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(integrate(sample_1d(g, sin1))) < 1e-14);
  ScalarField m0(g);
  for (std::size_t i = 0; i < g.cells(); ++i) m0[i] = 1.0 + 0.5 * cos1(g.point(i)[0]);
  CHECK(integrate(m0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("lp norms") {
  GridSpec g(1, 256, 1, 1.0);
  for (double p : {1.0, 2.0, 5.0}) CHECK(lp_norm(ScalarField(g, 1.0), p) == doctest::Approx(1.0));
  ScalarField spike(g);
  spike[17] = -3.5;
  CHECK(lp_norm(spike, std::numeric_limits<double>::infinity()) == 3.5);
  CHECK(lp_norm(sample_1d(g, sin1), 2.0) ==
        doctest::Approx(0.70710678118654752).epsilon(1e-6));
  CHECK_THROWS_AS(lp_norm(spike, 0.5), MfgError);
}

TEST_CASE("lp norm monotone in p on probability-normalized fields") {
  std::mt19937_64 rng(21);
  GridSpec g(1, 64, 1, 1.0);
  for (int rep = 0; rep < 10; ++rep) {
    ScalarField f = oracles::random_smooth_field(g, rng, 0.4);
    double lo = f.min();
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = f[i] - lo + 0.05;
    double mass = integrate(f);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] /= mass;
    double prev = 0.0;
    for (double p : {1.0, 1.5, 2.0, 3.0, 6.0}) {
      double cur = lp_norm(f, p);
      CHECK(cur >= prev - 1e-12);
      prev = cur;
    }
    CHECK(lp_norm(f, std::numeric_limits<double>::infinity()) >= prev - 1e-12);
  }
}

TEST_CASE("summation by parts: forward-gradient pairing is exact") {
  // integrate(f * lap g) == -integrate(fwd f . fwd g): the documented exact
  // pairing uses forward one-sided differences on both factors.
  std::mt19937_64 rng(5);
  for (int d : {1, 2}) {
    GridSpec g(d, 16, 1, 1.0);
    ScalarField f = oracles::random_smooth_field(g, rng);
    ScalarField w = oracles::random_smooth_field(g, rng);
    double lhs = integrate(multiply(f, laplacian(w)));
    UpwindPair uf = gradient_upwind_pair(f);
    UpwindPair uw = gradient_upwind_pair(w);
    double rhs = -integrate(dot(uf.forward, uw.forward));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("field dump round trip") {
  std::mt19937_64 rng(3);
  for (int d : {1, 2}) {
    GridSpec g(d, d == 1 ? 32 : 8, 4, 0.5);
    std::vector<ScalarField> frames;
    for (int k = 0; k <= g.nt; ++k) frames.push_back(oracles::random_smooth_field(g, rng));
    FieldTrajectory traj(g, frames);
    auto path = std::filesystem::temp_directory_path() / "mfglab_dump_test.mfgf";
    write_field_dump(path.string(), traj);
    FieldTrajectory back = read_field_dump(path.string(), g.T);
    REQUIRE(back.frame_count() == traj.frame_count());
    REQUIRE(back.grid() == g);
    for (int k = 0; k <= g.nt; ++k)
      for (std::size_t i = 0; i < g.cells(); ++i)
        CHECK(back.frame(k)[i] == traj.frame(k)[i]);
    std::filesystem::remove(path);
  }
}
