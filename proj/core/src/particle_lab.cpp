#include "mfglab/particle_lab.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

#include "mfglab/hjb_solver.hpp"
#include "mfglab/log_nonlinearity.hpp"

namespace mfglab {

namespace {

std::uint64_t splitmix64(std::uint64_t& s) {
  s += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

ParticleRng::ParticleRng(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t s = seed;
  std::uint64_t a = splitmix64(s);
  s = stream ^ 0xD2B74407B1CE6E93ULL;
  std::uint64_t b = splitmix64(s);
  state_ = a ^ (b + 0x9E3779B97F4A7C15ULL + (a << 6) + (a >> 2));
}

std::uint64_t ParticleRng::next_u64() { return splitmix64(state_); }

double ParticleRng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double ParticleRng::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  double u1 = uniform();
  while (u1 == 0.0) u1 = uniform();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double phi = 2.0 * std::numbers::pi * u2;
  cached_ = r * std::sin(phi);
  has_cached_ = true;
  return r * std::cos(phi);
}

namespace {

double wrap01(double x) {
  double w = x - std::floor(x);
  return w >= 1.0 ? 0.0 : w;
}

// Periodic (bi)linear interpolation from grid samples at x_i = i*h.
double interp(const ScalarField& f, const Point& x) {
  const GridSpec& g = f.grid();
  const int n = g.n;
  double sx = wrap01(x[0]) * n;
  int i0 = static_cast<int>(sx);
  double fx = sx - i0;
  i0 = g.wrap(i0);
  int i1 = g.wrap(i0 + 1);
  if (g.d == 1) return (1.0 - fx) * f[g.index(i0)] + fx * f[g.index(i1)];
  double sy = wrap01(x[1]) * n;
  int j0 = static_cast<int>(sy);
  double fy = sy - j0;
  j0 = g.wrap(j0);
  int j1 = g.wrap(j0 + 1);
  return (1.0 - fx) * (1.0 - fy) * f[g.index(i0, j0)] + fx * (1.0 - fy) * f[g.index(i1, j0)] +
         (1.0 - fx) * fy * f[g.index(i0, j1)] + fx * fy * f[g.index(i1, j1)];
}

double interp_comp(const VectorField& v, int comp, const Point& x) {
  const GridSpec& g = v.grid;
  const int n = g.n;
  double sx = wrap01(x[0]) * n;
  int i0 = static_cast<int>(sx);
  double fx = sx - i0;
  i0 = g.wrap(i0);
  int i1 = g.wrap(i0 + 1);
  const auto& a = v.comp[comp];
  if (g.d == 1) return (1.0 - fx) * a[g.index(i0)] + fx * a[g.index(i1)];
  double sy = wrap01(x[1]) * n;
  int j0 = static_cast<int>(sy);
  double fy = sy - j0;
  j0 = g.wrap(j0);
  int j1 = g.wrap(j0 + 1);
  return (1.0 - fx) * (1.0 - fy) * a[g.index(i0, j0)] + fx * (1.0 - fy) * a[g.index(i1, j0)] +
         (1.0 - fx) * fy * a[g.index(i0, j1)] + fx * fy * a[g.index(i1, j1)];
}

// Inverse-CDF sample of the piecewise-constant 1-d density; rejection in 2-d.
Point sample_initial(const ScalarField& m0, ParticleRng& rng, const std::vector<double>& cdf,
                     double m0_max) {
  const GridSpec& g = m0.grid();
  if (g.d == 1) {
    double u = rng.uniform();
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    int cell = static_cast<int>(std::min<std::ptrdiff_t>(it - cdf.begin(),
                                                         static_cast<std::ptrdiff_t>(g.n) - 1));
    double in_cell = rng.uniform();
    return {wrap01(g.coord(cell) - 0.5 * g.h() + in_cell * g.h()), 0.0};
  }
  for (int tries = 0; tries < 100000; ++tries) {
    Point x{rng.uniform(), rng.uniform()};
    if (rng.uniform() * m0_max <= interp(m0, x)) return x;
  }
  throw MfgError("simulate: rejection sampling exhausted (m0 degenerate?)");
}

}  // namespace

ScalarField histogram_density(const GridSpec& grid, const std::vector<Point>& positions) {
  ScalarField out(grid);
  double hd = grid.h();
  if (grid.d == 2) hd *= grid.h();
  const double weight = 1.0 / (static_cast<double>(positions.size()) * hd);
  for (const auto& x : positions) out[grid.cell_of(x)] += weight;
  return out;
}

double density_mismatch(const ParticleSnapshot& snap, const ScalarField& m) {
  const GridSpec& g = m.grid();
  ScalarField hist = histogram_density(g, snap.positions);
  double hd = g.h();
  if (g.d == 2) hd *= g.h();
  double l1 = 0.0;
  for (std::size_t c = 0; c < g.cells(); ++c) l1 += std::abs(hist[c] - m[c]) * hd;
  return l1;
}

std::vector<double> density_mismatch(const ParticleEnsemble& ens, const FieldTrajectory& m_traj) {
  std::vector<double> out;
  out.reserve(ens.snapshots.size());
  for (const auto& snap : ens.snapshots)
    out.push_back(density_mismatch(snap, m_traj.frame(snap.level)));
  return out;
}

ParticleEnsemble simulate(const MFGSolution& solution, const MFGProblem& problem,
                          const SimulateOptions& opts) {
  problem.validate();
  if (opts.N < 1) throw MfgError("simulate: N must be >= 1");
  const GridSpec& grid = problem.grid;
  const double dt = grid.dt();
  const double sqrt2dt = std::sqrt(2.0 * dt);

  std::vector<int> levels = opts.snapshot_levels;
  if (levels.empty()) levels = {0, grid.nt};
  for (int lv : levels)
    if (lv < 0 || lv > grid.nt) throw MfgError("simulate: snapshot level out of range");
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  // Per-frame drift v* = -D_pH(x, Du) and running cost
  //   L(x, v*) + g_eps(m) = D_pH.Du - H + g_eps   (Fenchel equality at v*).
  std::vector<VectorField> drift = extract_control(solution.u, problem.params);
  std::vector<ScalarField> running(grid.nt + 1, ScalarField(grid));
  for (int k = 0; k <= grid.nt; ++k) {
    VectorField du = gradient_central(solution.u.frame(k));
    ScalarField g = g_eps(solution.m.frame(k), problem.eps);
    for (std::size_t c = 0; c < grid.cells(); ++c) {
      std::array<double, 2> p{du.comp[0][c], grid.d == 2 ? du.comp[1][c] : 0.0};
      if (opts.control == ControlMode::optimal) {
        auto dph = problem.params.eval_DpH(grid.point(c), p);
        double dotv = dph[0] * p[0] + (grid.d == 2 ? dph[1] * p[1] : 0.0);
        running[k][c] = dotv - problem.params.eval_H(grid.point(c), p) + g[c];
      } else {
        // forced v = 0 pays L(x,0) + g
        running[k][c] =
            legendre_lagrangian(problem.params, grid.point(c), {0.0, 0.0}).value + g[c];
      }
    }
  }

  // 1-d inverse CDF of cell masses; 2-d rejection bound.
  std::vector<double> cdf;
  double m0_max = problem.m0.max();
  if (grid.d == 1) {
    cdf.resize(grid.n);
    double total = 0.0;
    for (int i = 0; i < grid.n; ++i) total += problem.m0[i];
    double acc = 0.0;
    for (int i = 0; i < grid.n; ++i) {
      acc += problem.m0[i] / total;
      cdf[i] = acc;
    }
    cdf[grid.n - 1] = 1.0;
  }

  ParticleEnsemble ens;
  ens.d = grid.d;
  ens.N = opts.N;
  ens.seed = opts.seed;
  ens.initial.resize(opts.N);
  ens.costs.resize(opts.N);
  ens.snapshots.reserve(levels.size());
  for (int lv : levels) ens.snapshots.push_back({lv, std::vector<Point>(opts.N)});

  auto run_range = [&](std::uint32_t begin, std::uint32_t end) {
    for (std::uint32_t i = begin; i < end; ++i) {
      ParticleRng rng(opts.seed, i);
      Point x = sample_initial(problem.m0, rng, cdf, m0_max);
      ens.initial[i] = x;
      double cost = 0.0;
      std::size_t snap_idx = 0;
      for (int k = 0; k <= grid.nt; ++k) {
        while (snap_idx < levels.size() && levels[snap_idx] == k) {
          ens.snapshots[snap_idx].positions[i] = x;
          ++snap_idx;
        }
        if (k == grid.nt) break;
        cost += dt * interp(running[k], x);
        double vx = opts.control == ControlMode::optimal ? interp_comp(drift[k], 0, x) : 0.0;
        double newx = x[0] + dt * vx + sqrt2dt * rng.normal();
        double newy = 0.0;
        if (grid.d == 2) {
          double vy = opts.control == ControlMode::optimal ? interp_comp(drift[k], 1, x) : 0.0;
          newy = x[1] + dt * vy + sqrt2dt * rng.normal();
        }
        x = {wrap01(newx), grid.d == 2 ? wrap01(newy) : 0.0};
      }
      cost += interp(problem.uT, x);
      ens.costs[i] = cost;
    }
  };

  int threads = std::max(1, opts.threads);
  if (threads == 1 || opts.N < 4096) {
    run_range(0, opts.N);
  } else {
    std::vector<std::thread> pool;
    std::uint32_t chunk = (opts.N + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      std::uint32_t b = t * chunk;
      std::uint32_t e = std::min<std::uint32_t>(opts.N, b + chunk);
      if (b >= e) break;
      pool.emplace_back(run_range, b, e);
    }
    for (auto& th : pool) th.join();
  }
  return ens;
}

CostComparison empirical_cost(const ParticleEnsemble& ens, const MFGSolution& solution,
                              const MFGProblem& problem, double bucket_lo, double bucket_hi) {
  if (!(bucket_lo < bucket_hi)) throw MfgError("empirical_cost: empty bucket interval");
  CostComparison out;
  double sum = 0.0, sum_sq = 0.0;
  for (std::uint32_t i = 0; i < ens.N; ++i) {
    double x = ens.initial[i][0];
    if (x < bucket_lo || x >= bucket_hi) continue;
    sum += ens.costs[i];
    sum_sq += ens.costs[i] * ens.costs[i];
    ++out.count;
  }
  if (out.count == 0) throw MfgError("empirical_cost: no particles start in the bucket");
  out.empirical_mean = sum / out.count;
  double var = std::max(0.0, sum_sq / out.count - out.empirical_mean * out.empirical_mean);
  out.standard_error = std::sqrt(var / out.count);

  const GridSpec& grid = problem.grid;
  double wsum = 0.0, vsum = 0.0;
  for (std::size_t c = 0; c < grid.cells(); ++c) {
    double x = grid.point(c)[0];
    if (x < bucket_lo || x >= bucket_hi) continue;
    wsum += problem.m0[c];
    vsum += problem.m0[c] * solution.u.frame(0)[c];
  }
  if (wsum <= 0.0) throw MfgError("empirical_cost: bucket carries no m0 mass");
  out.bucket_value = vsum / wsum;
  return out;
}

}  // namespace mfglab
