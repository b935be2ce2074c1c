#include "mfglab/fokker_planck.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mfglab/linsolve.hpp"

namespace mfglab {

namespace {

VectorField drift_from_u(const ScalarField& u_frame, const HamiltonianParams& params) {
  const GridSpec& grid = u_frame.grid();
  VectorField du = gradient_central(u_frame);
  VectorField b(grid);
  for (std::size_t c = 0; c < grid.cells(); ++c) {
    std::array<double, 2> p{du.comp[0][c], grid.d == 2 ? du.comp[1][c] : 0.0};
    auto dph = params.eval_DpH(grid.point(c), p);
    b.comp[0][c] = dph[0];
    if (grid.d == 2) b.comp[1][c] = dph[1];
  }
  return b;
}

void check_cfl(const GridSpec& grid, const VectorField& drift, double alpha, double dt) {
  double bmax = drift.max_norm2();
  double denom = 2.0 * grid.d * (alpha + bmax);
  if (denom <= 0.0) return;  // no advection, no explicit constraint
  double dt_max = grid.h() / denom;
  if (dt > dt_max) {
    std::ostringstream os;
    os << "fp step: CFL violated, dt = " << dt << " exceeds h/(2d(alpha+max|b|)) = " << dt_max
       << "; reduce dt to at most " << dt_max;
    throw CflError(os.str(), dt_max);
  }
}

ScalarField step_with_drift(const ScalarField& m, const VectorField& drift,
                            const HamiltonianParams&, const HJBConfig& cfg, double dt,
                            PeriodicDiffusionSolver& solver) {
  const GridSpec& grid = m.grid();
  check_cfl(grid, drift, cfg.alpha, dt);
  ScalarField explicit_part = fp_explicit_apply(m, drift, cfg.alpha, dt);
  ScalarField out = solver.solve(explicit_part);
  if (solver.last_residual() > cfg.lin_tol)
    throw MfgError("fp step: implicit solve residual exceeds lin_tol");
  if (!out.all_finite()) throw MfgError("fp step: NaN in updated frame");
  double mn = out.min();
  if (mn < kNegativityTol)
    throw MfgError("fp step: negativity " + std::to_string(mn) + " beyond tolerance");
  return out;
}

}  // namespace

ScalarField fp_explicit_apply(const ScalarField& m, const VectorField& drift, double alpha,
                              double dt) {
  const GridSpec& grid = m.grid();
  if (!(drift.grid == grid)) throw MfgError("fp_explicit_apply: grid mismatch");
  ScalarField out = m;
  const double inv2h = 0.5 * grid.n;
  const double invh = grid.n;

  // Conservative flux form per axis with flux
  //   F_{i+1/2} = -((b m)_{i+1} + (b m)_i)/2 - (alpha/2)(m_{i+1} - m_i),
  // equal to dt*(div_c(b m) + (alpha*h/2) Lap m) after differencing.
  auto axis_update = [&](std::size_t c, std::size_t plus, std::size_t minus, double b_plus,
                         double b_minus) {
    double adv = (b_plus * m[plus] - b_minus * m[minus]) * inv2h;
    double diff = 0.5 * alpha * (m[plus] - 2.0 * m[c] + m[minus]) * invh;
    out[c] += dt * (adv + diff);
  };
  if (grid.d == 1) {
    for (int i = 0; i < grid.n; ++i) {
      std::size_t c = grid.index(i), p = grid.index(grid.wrap(i + 1)),
                  q = grid.index(grid.wrap(i - 1));
      axis_update(c, p, q, drift.comp[0][p], drift.comp[0][q]);
    }
  } else {
    for (int i = 0; i < grid.n; ++i)
      for (int j = 0; j < grid.n; ++j) {
        std::size_t c = grid.index(i, j);
        std::size_t xp = grid.index(grid.wrap(i + 1), j), xm = grid.index(grid.wrap(i - 1), j);
        std::size_t yp = grid.index(i, grid.wrap(j + 1)), ym = grid.index(i, grid.wrap(j - 1));
        axis_update(c, xp, xm, drift.comp[0][xp], drift.comp[0][xm]);
        axis_update(c, yp, ym, drift.comp[1][yp], drift.comp[1][ym]);
      }
  }
  return out;
}

std::vector<double> fp_advection_matrix(const GridSpec& grid, const VectorField& drift,
                                        double alpha, double dt) {
  const std::size_t N = grid.cells();
  std::vector<double> mat(N * N, 0.0);
  ScalarField basis(grid);
  for (std::size_t j = 0; j < N; ++j) {
    basis.values().assign(N, 0.0);
    basis[j] = 1.0;
    ScalarField col = fp_explicit_apply(basis, drift, alpha, dt);
    for (std::size_t i = 0; i < N; ++i) mat[i * N + j] = col[i];
  }
  return mat;
}

ScalarField fp_step_forward(const ScalarField& m, const ScalarField& u_frame,
                            const HamiltonianParams& params, const HJBConfig& cfg, double dt) {
  const GridSpec& grid = m.grid();
  if (!(u_frame.grid() == grid)) throw MfgError("fp_step_forward: grid mismatch");
  if (!(dt > 0.0)) throw MfgError("fp_step_forward: dt must be positive");
  cfg.validate(grid.h());
  if (m.min() < 0.0) throw MfgError("fp_step_forward: negative input density");
  VectorField b = drift_from_u(u_frame, params);
  PeriodicDiffusionSolver solver(grid, dt * cfg.implicit_coefficient(grid.h()));
  return step_with_drift(m, b, params, cfg, dt, solver);
}

FieldTrajectory fp_solve_forward(const ScalarField& m0, const FieldTrajectory& u_traj,
                                 const HamiltonianParams& params, const HJBConfig& cfg,
                                 const FieldTrajectory* source) {
  const GridSpec& grid = m0.grid();
  if (!(u_traj.grid() == grid)) throw MfgError("fp_solve_forward: grid mismatch");
  if (source && !(source->grid() == grid))
    throw MfgError("fp_solve_forward: source trajectory grid mismatch");
  cfg.validate(grid.h());
  if (m0.min() < 0.0) throw MfgError("fp_solve_forward: m0 must be nonnegative");
  double mass = integrate(m0);
  if (std::abs(mass - 1.0) > kMassTol)
    throw MfgError("fp_solve_forward: m0 mass " + std::to_string(mass) + " is not 1");
  const double dt = grid.dt();

  std::vector<ScalarField> frames;
  frames.reserve(grid.nt + 1);
  frames.push_back(m0);
  PeriodicDiffusionSolver solver(grid, dt * cfg.implicit_coefficient(grid.h()));
  for (int k = 0; k < grid.nt; ++k) {
    VectorField b = drift_from_u(u_traj.frame(k + 1), params);
    try {
      ScalarField cur = frames.back();
      if (source)
        for (std::size_t i = 0; i < cur.size(); ++i) cur[i] += dt * source->frame(k)[i];
      frames.push_back(step_with_drift(cur, b, params, cfg, dt, solver));
    } catch (const CflError&) {
      throw;
    } catch (const MfgError& e) {
      throw MfgError(std::string(e.what()) + " (FP step onto level " + std::to_string(k + 1) +
                     ")");
    }
  }
  return FieldTrajectory(grid, std::move(frames));
}

AdjointRun solve_adjoint(std::size_t x0, int tau, const FieldTrajectory& u_traj,
                         const HamiltonianParams& params, const HJBConfig& cfg,
                         int mollify_cells) {
  const GridSpec& grid = u_traj.grid();
  if (tau < 0 || tau >= grid.nt)
    throw MfgError("solve_adjoint: tau must satisfy 0 <= tau < nt");
  if (x0 >= grid.cells()) throw MfgError("solve_adjoint: x0 out of range");
  if (mollify_cells < 0) throw MfgError("solve_adjoint: mollify_cells must be >= 0");
  cfg.validate(grid.h());
  const double dt = grid.dt();

  AdjointRun run;
  run.grid = grid;
  run.x0 = x0;
  run.tau = tau;

  ScalarField delta(grid);
  double hd = grid.h();
  if (grid.d == 2) hd *= grid.h();
  if (mollify_cells == 0) {
    delta[x0] = 1.0 / hd;  // unit mass on every grid
  } else {
    const double sigma = static_cast<double>(mollify_cells);
    Point c = grid.point(x0);
    auto wrap_dist = [&](double a, double b) {
      double dd = std::abs(a - b);
      return std::min(dd, 1.0 - dd) * grid.n;  // in cells
    };
    for (std::size_t i = 0; i < grid.cells(); ++i) {
      Point x = grid.point(i);
      double r2 = wrap_dist(x[0], c[0]) * wrap_dist(x[0], c[0]);
      if (grid.d == 2) r2 += wrap_dist(x[1], c[1]) * wrap_dist(x[1], c[1]);
      delta[i] = std::exp(-0.5 * r2 / (sigma * sigma));
    }
    double mass = integrate(delta);
    for (std::size_t i = 0; i < grid.cells(); ++i) delta[i] /= mass;
  }
  run.frames.push_back(delta);

  PeriodicDiffusionSolver solver(grid, dt * cfg.implicit_coefficient(grid.h()));
  for (int k = tau; k < grid.nt; ++k) {
    VectorField b = drift_from_u(u_traj.frame(k + 1), params);
    ScalarField next = step_with_drift(run.frames.back(), b, params, cfg, dt, solver);
    double mass = integrate(next);
    if (std::abs(mass - 1.0) > kMassTol)
      throw MfgError("solve_adjoint: mass drift " + std::to_string(mass - 1.0) + " at level " +
                     std::to_string(k + 1));
    run.frames.push_back(std::move(next));
  }
  return run;
}

double dirichlet_energy(const ScalarField& f, double nu) {
  if (!(nu > 0.0 && nu < 1.0)) throw MfgError("dirichlet_energy: nu must lie in (0,1)");
  ScalarField powed(f.grid());
  for (std::size_t i = 0; i < f.size(); ++i)
    powed[i] = f[i] > 0.0 ? std::pow(f[i], 0.5 * nu) : 0.0;
  VectorField g = gradient_central(powed);
  return integrate(dot(g, g));
}

double adjoint_energy(const AdjointRun& run, double nu) {
  if (!(nu > 0.0 && nu < 1.0)) throw MfgError("adjoint_energy: nu must lie in (0,1)");
  const double dt = run.grid.dt();
  double total = 0.0;
  const int K = run.levels();
  for (int k = 0; k < K; ++k) {
    double w = (k == 0 || k == K - 1) ? 0.5 : 1.0;
    total += w * dt * dirichlet_energy(run.frames[k], nu);
  }
  return K >= 2 ? total : 0.0;
}

}  // namespace mfglab
