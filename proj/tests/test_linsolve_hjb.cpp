#include <doctest.h>

#include <cmath>
#include <random>

#include "mfglab/hjb_solver.hpp"
#include "mfglab/linsolve.hpp"
#include "test_oracles.hpp"

using namespace mfglab;
using oracles::kTwoPi;

namespace {

HamiltonianParams unit_params(double gamma = 1.2) {
  return HamiltonianParams(FourierFn::constant_fn(1, 1.0), FourierFn::constant_fn(1, 0.0), gamma);
}

HamiltonianParams tiny_params(int d = 1) {
  // H ~ 0 within double precision: isolates the diffusion path
  return HamiltonianParams(FourierFn::constant_fn(d, 1e-30), FourierFn::constant_fn(d, 0.0),
                           1.2);
}

}  // namespace

TEST_CASE("periodic diffusion solver solves exactly in 1-d and 2-d") {
  std::mt19937_64 rng(2);
  for (int d : {1, 2}) {
    GridSpec g(d, 32, 1, 1.0);
    PeriodicDiffusionSolver solver(g, 3e-3);
    ScalarField rhs = oracles::random_smooth_field(g, rng);
    ScalarField x = solver.solve(rhs);
    CHECK(solver.last_residual() < 1e-12);
    ScalarField lap = laplacian(x);
    for (std::size_t i = 0; i < x.size(); ++i)
      CHECK(x[i] - 3e-3 * lap[i] == doctest::Approx(rhs[i]).epsilon(1e-11));
  }
}

TEST_CASE("constant stationary balance is exact") {
  GridSpec g(1, 64, 1, 0.5);
  double dt = 0.01;
  HJBConfig cfg{0.0, 1e-8};
  ScalarField u_next(g, 2.5);

  ScalarField g_match(g, 1.0);  // equals H(x, 0) = a0 + V0
  ScalarField u_prev = hjb_step_backward(u_next, g_match, unit_params(), cfg, dt);
  for (std::size_t i = 0; i < u_prev.size(); ++i)
    CHECK(std::abs(u_prev[i] - 2.5) < 1e-13);  // balance exact up to solve roundoff

  ScalarField g0(g, 0.25);
  ScalarField u2 = hjb_step_backward(u_next, g0, unit_params(), cfg, dt);
  for (std::size_t i = 0; i < u2.size(); ++i)
    CHECK(std::abs(u2[i] - (2.5 - dt * (1.0 - 0.25))) < 1e-13);
}

TEST_CASE("pure heat decay per step") {
  GridSpec g(1, 128, 1, 1.0);
  double dt = 1e-4;
  ScalarField uT(g);
  for (std::size_t i = 0; i < g.cells(); ++i) uT[i] = std::sin(kTwoPi * g.point(i)[0]);
  ScalarField u = hjb_step_backward(uT, ScalarField(g, 0.0), tiny_params(), HJBConfig{0.0, 1e-8},
                                    dt);
  double expect = std::exp(-4.0 * std::numbers::pi * std::numbers::pi * dt);
  for (std::size_t i = 0; i < g.cells(); ++i) {
    if (std::abs(uT[i]) < 0.2) continue;  // avoid division noise near zeros
    CHECK(u[i] / uT[i] == doctest::Approx(expect).epsilon(2e-5));
  }
}

TEST_CASE("compounded heat decay over many steps") {
  GridSpec g(1, 128, 16, 1.0 / 512);
  ScalarField uT(g);
  for (std::size_t i = 0; i < g.cells(); ++i) uT[i] = std::sin(kTwoPi * g.point(i)[0]);
  FieldTrajectory zero(g, ScalarField(g, 0.0));
  FieldTrajectory u = hjb_solve_backward(uT, zero, tiny_params(), HJBConfig{0.0, 1e-8});
  // discrete mode-1 eigenvalue of the 3-point Laplacian
  double lam_h = 4.0 * std::pow(std::sin(std::numbers::pi * g.h()) / g.h(), 2.0);
  double per_step = 1.0 / (1.0 + g.dt() * lam_h);
  double factor = std::pow(per_step, g.nt);
  for (std::size_t i = 0; i < g.cells(); ++i)
    CHECK(u.frame(0)[i] == doctest::Approx(uT[i] * factor).epsilon(1e-10));
}

TEST_CASE("constant problem solved backward exactly") {
  GridSpec g(1, 64, 100, 0.5);
  FieldTrajectory zero_g(g, ScalarField(g, 0.0));
  FieldTrajectory u = hjb_solve_backward(ScalarField(g, 0.0), zero_g, unit_params(),
                                         HJBConfig{0.0, 1e-8});
  for (int k = 0; k <= g.nt; ++k)
    for (std::size_t i = 0; i < g.cells(); ++i)
      CHECK(u.frame(k)[i] == doctest::Approx(g.time(k) - g.T).epsilon(1e-13));
}

TEST_CASE("frame count mismatch rejected") {
  GridSpec g(1, 64, 10, 0.5);
  GridSpec g2(1, 64, 11, 0.55);
  FieldTrajectory wrong(g2, ScalarField(g2, 0.0));
  CHECK_THROWS_AS(
      hjb_solve_backward(ScalarField(g, 0.0), wrong, unit_params(), HJBConfig{0.0, 1e-8}),
      MfgError);
}

TEST_CASE("extract_control closed forms and duality consistency") {
  GridSpec g(1, 128, 2, 0.1);
  FieldTrajectory constant(g, ScalarField(g, 1.7));
  auto v0 = extract_control(constant, unit_params());
  for (const auto& frame : v0)
    for (double v : frame.comp[0]) CHECK(v == 0.0);

  // gamma = 2, a = 1: v* = -2 Du
  HamiltonianParams quad(FourierFn::constant_fn(1, 1.0), FourierFn::constant_fn(1, 0.0), 2.0);
  ScalarField u(g);
  for (std::size_t i = 0; i < g.cells(); ++i) u[i] = 0.3 * std::sin(kTwoPi * g.point(i)[0]);
  FieldTrajectory ut(g, u);
  auto ctrl = extract_control(ut, quad);
  VectorField du = gradient_central(u);
  for (std::size_t i = 0; i < g.cells(); ++i)
    CHECK(ctrl[0].comp[0][i] == doctest::Approx(-2.0 * du.comp[0][i]).epsilon(1e-13));

  // Fenchel equality -v*.p - L(x, v*) = H(x, p) at p = Du
  HamiltonianParams hp(FourierFn(1, 1.0).add_cos({1, 0}, 0.1), FourierFn::constant_fn(1, 0.0),
                       1.2);
  auto ctrl2 = extract_control(ut, hp);
  for (std::size_t i = 0; i < g.cells(); i += 13) {
    double p = du.comp[0][i];
    double vstar = ctrl2[0].comp[0][i];
    double L = legendre_lagrangian(hp, g.point(i), {vstar, 0.0}).value;
    CHECK(-vstar * p - L == doctest::Approx(hp.eval_H(g.point(i), {p, 0.0})).epsilon(1e-6));
  }
}

TEST_CASE("sup gradient") {
  GridSpec g(1, 256, 1, 1.0);
  CHECK(sup_gradient(FieldTrajectory(g, ScalarField(g, 4.2))) == 0.0);
  ScalarField s(g);
  for (std::size_t i = 0; i < g.cells(); ++i) s[i] = std::sin(kTwoPi * g.point(i)[0]);
  double sup = sup_gradient_frame(s);
  CHECK(sup == doctest::Approx(kTwoPi).epsilon(1e-3));

  std::vector<ScalarField> frames{ScalarField(g, 0.0), s};
  GridSpec g1(1, 256, 1, 1.0);
  CHECK(sup_gradient(FieldTrajectory(g1, frames)) >=
        sup_gradient(FieldTrajectory(g1, std::vector<ScalarField>{ScalarField(g, 0.0), ScalarField(g, 0.0)})));
}

TEST_CASE("explicit operator is monotone under the dissipation bound") {
  std::mt19937_64 rng(31);
  GridSpec g(1, 32, 1, 1.0);
  HamiltonianParams hp = unit_params();
  ScalarField u = oracles::random_smooth_field(g, rng, 0.5);

  double alpha = 1.2 * dph_bound_frame(u, hp) + 0.05;
  double dt = 0.5 * g.h() / alpha;  // diagonal stays nonnegative
  HJBConfig cfg{alpha, 1e-8};
  ScalarField base = hjb_step_backward(u, ScalarField(g, 0.0), hp, cfg, dt);

  std::uniform_int_distribution<std::size_t> pick(0, g.cells() - 1);
  for (int rep = 0; rep < 20; ++rep) {
    std::size_t j = pick(rng);
    ScalarField bumped = u;
    bumped[j] += 1e-3;
    ScalarField stepped = hjb_step_backward(bumped, ScalarField(g, 0.0), hp, cfg, dt);
    for (std::size_t i = 0; i < g.cells(); ++i) CHECK(stepped[i] >= base[i] - 1e-12);
  }
}

TEST_CASE("comparison in the source: larger g gives larger u") {
  std::mt19937_64 rng(37);
  GridSpec g(1, 32, 16, 0.125);
  HamiltonianParams hp = unit_params();
  ScalarField uT = oracles::random_smooth_field(g, rng, 0.2);

  ScalarField g_lo = oracles::random_smooth_field(g, rng, 0.3);
  ScalarField g_hi = g_lo;
  ScalarField bump = oracles::random_smooth_field(g, rng, 0.2);
  for (std::size_t i = 0; i < g.cells(); ++i) g_hi[i] += std::abs(bump[i]) + 0.01;

  double alpha = 2.0;
  HJBConfig cfg{alpha, 1e-8};
  REQUIRE(g.dt() <= g.h() / alpha);
  FieldTrajectory u_lo = hjb_solve_backward(uT, FieldTrajectory(g, g_lo), hp, cfg);
  FieldTrajectory u_hi = hjb_solve_backward(uT, FieldTrajectory(g, g_hi), hp, cfg);
  // alpha must dominate the visited |D_pH| for the comparison argument
  REQUIRE(dph_bound(u_lo, hp) <= alpha);
  REQUIRE(dph_bound(u_hi, hp) <= alpha);
  for (int k = 0; k <= g.nt; ++k)
    for (std::size_t i = 0; i < g.cells(); ++i)
      CHECK(u_hi.frame(k)[i] >= u_lo.frame(k)[i] - 1e-12);
}

TEST_CASE("linearized explicit matrix matches a finite-difference jacobian") {
  std::mt19937_64 rng(41);
  GridSpec g(1, 8, 1, 0.01);
  HamiltonianParams hp = unit_params();
  ScalarField u = oracles::random_smooth_field(g, rng, 0.4);
  double alpha = 1.2 * dph_bound_frame(u, hp) + 0.1;
  double dt = g.dt();
  HJBConfig cfg{alpha, 1e-8};

  VectorField du = gradient_central(u);
  VectorField drift(g);
  for (std::size_t c = 0; c < g.cells(); ++c)
    drift.comp[0][c] = hp.eval_DpH(g.point(c), {du.comp[0][c], 0.0})[0];
  auto lin = hjb_linearized_explicit_matrix(g, drift, alpha, dt);

  // FD of the full step, then undo the implicit solve by applying (I - c Lap)
  const std::size_t N = g.cells();
  PeriodicDiffusionSolver dummy(g, 0.0);
  double cdiff = dt * cfg.implicit_coefficient(g.h());
  ScalarField zero_g(g, 0.0);
  double delta = 1e-6;
  for (std::size_t j = 0; j < N; ++j) {
    ScalarField up = u, um = u;
    up[j] += delta;
    um[j] -= delta;
    ScalarField sp = hjb_step_backward(up, zero_g, hp, cfg, dt);
    ScalarField sm = hjb_step_backward(um, zero_g, hp, cfg, dt);
    ScalarField col(g);
    for (std::size_t i = 0; i < N; ++i) col[i] = (sp[i] - sm[i]) / (2.0 * delta);
    ScalarField lap = laplacian(col);
    for (std::size_t i = 0; i < N; ++i) {
      double undone = col[i] - cdiff * lap[i];
      CHECK(undone == doctest::Approx(lin[i * N + j]).epsilon(1e-5));
    }
  }
}
