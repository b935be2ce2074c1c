#include "mfglab/hjb_solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mfglab/linsolve.hpp"

namespace mfglab {

void HJBConfig::validate(double h) const {
  if (!(alpha >= 0.0) || !std::isfinite(alpha))
    throw MfgError("HJBConfig: alpha must be nonnegative and finite");
  if (!(lin_tol > 0.0) || lin_tol > 1e-6)
    throw MfgError("HJBConfig: lin_tol must lie in (0, 1e-6]");
  if (!(implicit_coefficient(h) > 0.0))
    throw MfgError("HJBConfig: alpha*h/2 >= 1 leaves no implicit diffusion; reduce alpha or h");
}

namespace {

// Explicit part shared by the step and the solver: u - dt*Hhat(u) + dt*g with
// the Lax-Friedrichs numerical Hamiltonian
//   Hhat = H(x, (D^+ u + D^- u)/2) - (alpha/2) sum_a (D_a^+ u - D_a^- u).
ScalarField hjb_explicit_apply(const ScalarField& u, const ScalarField& g_frame,
                               const HamiltonianParams& params, double alpha, double dt) {
  const GridSpec& grid = u.grid();
  UpwindPair uw = gradient_upwind_pair(u);
  ScalarField out(grid);
  for (std::size_t c = 0; c < grid.cells(); ++c) {
    std::array<double, 2> p{0.5 * (uw.forward.comp[0][c] + uw.backward.comp[0][c]), 0.0};
    double diss = uw.forward.comp[0][c] - uw.backward.comp[0][c];
    if (grid.d == 2) {
      p[1] = 0.5 * (uw.forward.comp[1][c] + uw.backward.comp[1][c]);
      diss += uw.forward.comp[1][c] - uw.backward.comp[1][c];
    }
    double hhat = params.eval_H(grid.point(c), p) - 0.5 * alpha * diss;
    // g and Hhat must cancel before the dt scaling: exact stationary balance
    out[c] = u[c] + dt * (g_frame[c] - hhat);
  }
  return out;
}

}  // namespace

ScalarField hjb_step_backward(const ScalarField& u_next, const ScalarField& g_frame,
                              const HamiltonianParams& params, const HJBConfig& cfg, double dt) {
  const GridSpec& grid = u_next.grid();
  if (!(g_frame.grid() == grid)) throw MfgError("hjb_step_backward: grid mismatch");
  if (!(dt > 0.0)) throw MfgError("hjb_step_backward: dt must be positive");
  cfg.validate(grid.h());
  u_next.require_finite("hjb_step_backward: u");
  ScalarField rhs = hjb_explicit_apply(u_next, g_frame, params, cfg.alpha, dt);
  PeriodicDiffusionSolver solver(grid, dt * cfg.implicit_coefficient(grid.h()));
  ScalarField u_prev = solver.solve(rhs);
  if (solver.last_residual() > cfg.lin_tol)
    throw MfgError("hjb_step_backward: implicit solve residual " +
                   std::to_string(solver.last_residual()) + " exceeds lin_tol");
  if (!u_prev.all_finite()) throw MfgError("hjb_step_backward: NaN in updated frame");
  return u_prev;
}

FieldTrajectory hjb_solve_backward(const ScalarField& u_T, const FieldTrajectory& g_traj,
                                   const HamiltonianParams& params, const HJBConfig& cfg) {
  const GridSpec& grid = u_T.grid();
  if (!(g_traj.grid() == grid))
    throw MfgError("hjb_solve_backward: source trajectory grid mismatch");
  if (g_traj.frame_count() != grid.nt + 1)
    throw MfgError("hjb_solve_backward: expected " + std::to_string(grid.nt + 1) +
                   " source frames, got " + std::to_string(g_traj.frame_count()));
  cfg.validate(grid.h());
  const double dt = grid.dt();

  std::vector<ScalarField> frames(grid.nt + 1, ScalarField(grid));
  frames[grid.nt] = u_T;
  PeriodicDiffusionSolver solver(grid, dt * cfg.implicit_coefficient(grid.h()));
  for (int k = grid.nt - 1; k >= 0; --k) {
    ScalarField rhs =
        hjb_explicit_apply(frames[k + 1], g_traj.frame(k + 1), params, cfg.alpha, dt);
    frames[k] = solver.solve(rhs);
    if (solver.last_residual() > cfg.lin_tol)
      throw MfgError("hjb_solve_backward: implicit residual exceeds lin_tol at level " +
                     std::to_string(k));
    if (!frames[k].all_finite())
      throw MfgError("hjb_solve_backward: NaN at time level " + std::to_string(k));
  }
  return FieldTrajectory(grid, std::move(frames));
}

std::vector<VectorField> extract_control(const FieldTrajectory& u_traj,
                                         const HamiltonianParams& params) {
  const GridSpec& grid = u_traj.grid();
  std::vector<VectorField> out;
  out.reserve(u_traj.frame_count());
  for (int k = 0; k < u_traj.frame_count(); ++k) {
    u_traj.frame(k).require_finite("extract_control");
    VectorField du = gradient_central(u_traj.frame(k));
    VectorField v(grid);
    for (std::size_t c = 0; c < grid.cells(); ++c) {
      std::array<double, 2> p{du.comp[0][c], grid.d == 2 ? du.comp[1][c] : 0.0};
      auto dph = params.eval_DpH(grid.point(c), p);
      v.comp[0][c] = -dph[0];
      if (grid.d == 2) v.comp[1][c] = -dph[1];
    }
    out.push_back(std::move(v));
  }
  return out;
}

double sup_gradient_frame(const ScalarField& u) { return gradient_central(u).max_norm2(); }

double sup_gradient(const FieldTrajectory& u_traj) {
  double m = 0.0;
  for (int k = 0; k < u_traj.frame_count(); ++k)
    m = std::max(m, sup_gradient_frame(u_traj.frame(k)));
  return m;
}

double dph_bound_frame(const ScalarField& u, const HamiltonianParams& params) {
  const GridSpec& grid = u.grid();
  VectorField du = gradient_central(u);
  double m = 0.0;
  for (std::size_t c = 0; c < grid.cells(); ++c) {
    std::array<double, 2> p{du.comp[0][c], grid.d == 2 ? du.comp[1][c] : 0.0};
    auto dph = params.eval_DpH(grid.point(c), p);
    m = std::max(m, std::abs(dph[0]));
    if (grid.d == 2) m = std::max(m, std::abs(dph[1]));
  }
  return m;
}

double dph_bound(const FieldTrajectory& u_traj, const HamiltonianParams& params) {
  double m = 0.0;
  for (int k = 0; k < u_traj.frame_count(); ++k)
    m = std::max(m, dph_bound_frame(u_traj.frame(k), params));
  return m;
}

std::vector<double> hjb_linearized_explicit_matrix(const GridSpec& grid, const VectorField& drift,
                                                   double alpha, double dt) {
  if (!(drift.grid == grid)) throw MfgError("hjb_linearized_explicit_matrix: grid mismatch");
  const std::size_t N = grid.cells();
  std::vector<double> mat(N * N, 0.0);
  const double inv2h = 0.5 * grid.n;
  const double invh = grid.n;
  auto at = [&](std::size_t row, std::size_t col) -> double& { return mat[row * N + col]; };
  auto add_axis = [&](std::size_t c, std::size_t plus, std::size_t minus, double b) {
    // -dt * b * central difference + dt*(alpha*h/2) * axis Laplacian
    at(c, plus) += -dt * b * inv2h + dt * 0.5 * alpha * invh;
    at(c, minus) += dt * b * inv2h + dt * 0.5 * alpha * invh;
    at(c, c) += -dt * alpha * invh;
  };
  if (grid.d == 1) {
    for (int i = 0; i < grid.n; ++i) {
      std::size_t c = grid.index(i);
      at(c, c) += 1.0;
      add_axis(c, grid.index(grid.wrap(i + 1)), grid.index(grid.wrap(i - 1)), drift.comp[0][c]);
    }
  } else {
    for (int i = 0; i < grid.n; ++i)
      for (int j = 0; j < grid.n; ++j) {
        std::size_t c = grid.index(i, j);
        at(c, c) += 1.0;
        add_axis(c, grid.index(grid.wrap(i + 1), j), grid.index(grid.wrap(i - 1), j),
                 drift.comp[0][c]);
        add_axis(c, grid.index(i, grid.wrap(j + 1)), grid.index(i, grid.wrap(j - 1)),
                 drift.comp[1][c]);
      }
  }
  return mat;
}

}  // namespace mfglab
