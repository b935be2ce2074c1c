#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "mfglab/exponents.hpp"
#include "mfglab/fokker_planck.hpp"
#include "mfglab/hjb_solver.hpp"
#include "mfglab/mfg_coupler.hpp"

namespace {

using namespace mfglab;

HamiltonianParams model_params(int d = 1) {
  FourierFn a(d, 1.0);
  a.add_cos({1, 0}, 0.1);
  return HamiltonianParams(a, FourierFn::constant_fn(d, 0.0), 1.2);
}

ScalarField wave(const GridSpec& g, double amp) {
  ScalarField f(g);
  for (std::size_t i = 0; i < g.cells(); ++i)
    f[i] = 1.0 + amp * std::cos(2.0 * std::numbers::pi * g.point(i)[0]);
  return f;
}

void BM_HjbStep1d(benchmark::State& state) {
  GridSpec g(1, static_cast<int>(state.range(0)), 1, 1.0);
  HamiltonianParams hp = model_params();
  ScalarField u = wave(g, 0.3);
  ScalarField src(g, 0.0);
  HJBConfig cfg{1.0, 1e-8};
  for (auto _ : state) {
    ScalarField next = hjb_step_backward(u, src, hp, cfg, 1e-4);
    benchmark::DoNotOptimize(next.values().data());
  }
}
BENCHMARK(BM_HjbStep1d)->Arg(128)->Arg(512)->Arg(2048);

void BM_FpStep1d(benchmark::State& state) {
  GridSpec g(1, static_cast<int>(state.range(0)), 1, 1.0);
  HamiltonianParams hp = model_params();
  ScalarField m = wave(g, 0.2);
  double mass = integrate(m);
  for (std::size_t i = 0; i < m.size(); ++i) m[i] /= mass;
  ScalarField u = wave(g, 0.1);
  HJBConfig cfg{1.0, 1e-8};
  double dt = 0.25 * g.h() / (2.0 * (1.0 + 1.0));
  for (auto _ : state) {
    ScalarField next = fp_step_forward(m, u, hp, cfg, dt);
    benchmark::DoNotOptimize(next.values().data());
  }
}
BENCHMARK(BM_FpStep1d)->Arg(128)->Arg(512)->Arg(2048);

void BM_PicardConstant(benchmark::State& state) {
  GridSpec g(1, 64, 100, 0.5);
  MFGProblem prob{g,
                  HamiltonianParams(FourierFn::constant_fn(1, 1.0),
                                    FourierFn::constant_fn(1, 0.0), 1.2),
                  ScalarField(g, 1.0), ScalarField(g, 0.0), 0.0};
  PicardOptions opts;
  opts.omega = 0.6;
  opts.tol = 1e-11;
  opts.max_iter = 20;
  for (auto _ : state) {
    MFGSolution sol = picard_solve(prob, opts);
    benchmark::DoNotOptimize(sol.report.iterations);
  }
}
BENCHMARK(BM_PicardConstant);

void BM_Legendre(benchmark::State& state) {
  HamiltonianParams hp = model_params();
  double v = 0.0;
  for (auto _ : state) {
    v += 1e-6;
    LegendreResult lr = legendre_lagrangian(hp, {0.3, 0.0}, {1.0 + v, 0.0});
    benchmark::DoNotOptimize(lr.value);
  }
}
BENCHMARK(BM_Legendre);

void BM_ExponentWitnessA(benchmark::State& state) {
  for (auto _ : state) {
    ExponentWitnessA w = feasible_rho_exponents(3, Rational(5, 4), Rational(3, 2), Rational(3, 4));
    benchmark::DoNotOptimize(&w);
  }
}
BENCHMARK(BM_ExponentWitnessA);

void BM_YoungBound(benchmark::State& state) {
  for (auto _ : state) {
    double x = young_bound(1.0, 0.5);
    benchmark::DoNotOptimize(x);
  }
}
BENCHMARK(BM_YoungBound);

}  // namespace

BENCHMARK_MAIN();
