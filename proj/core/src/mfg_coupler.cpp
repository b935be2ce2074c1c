#include "mfglab/mfg_coupler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace mfglab {

void MFGProblem::validate() const {
  if (params.dim() != grid.d) throw MfgError("MFGProblem: Hamiltonian dimension mismatch");
  if (!(m0.grid() == grid) || !(uT.grid() == grid))
    throw MfgError("MFGProblem: data grids do not match the problem grid");
  m0.require_finite("MFGProblem: m0");
  uT.require_finite("MFGProblem: uT");
  if (m0.min() < 0.0) throw MfgError("MFGProblem: m0 must be nonnegative");
  double mass = integrate(m0);
  if (std::abs(mass - 1.0) > kMassTol)
    throw MfgError("MFGProblem: m0 mass " + std::to_string(mass) + " differs from 1");
  if (!(eps >= 0.0)) throw MfgError("MFGProblem: eps must be >= 0");
  if (eps == 0.0 && !(m0.min() > 0.0))
    throw MfgError("MFGProblem: eps = 0 requires strictly positive m0");
}

void PicardOptions::validate() const {
  if (!(omega > 0.0 && omega <= 1.0)) throw MfgError("PicardOptions: omega must lie in (0,1]");
  if (!(tol > 0.0)) throw MfgError("PicardOptions: tol must be positive");
  if (max_iter < 1) throw MfgError("PicardOptions: max_iter must be >= 1");
}

namespace {

FieldTrajectory g_eps_trajectory(const FieldTrajectory& m_traj, double eps) {
  std::vector<ScalarField> frames;
  frames.reserve(m_traj.frame_count());
  for (int k = 0; k < m_traj.frame_count(); ++k) frames.push_back(g_eps(m_traj.frame(k), eps));
  return FieldTrajectory(m_traj.grid(), std::move(frames));
}

double sup_traj_distance(const FieldTrajectory& a, const FieldTrajectory& b) {
  double m = 0.0;
  for (int k = 0; k < a.frame_count(); ++k)
    m = std::max(m, sup_distance(a.frame(k), b.frame(k)));
  return m;
}

}  // namespace

MFGSolution picard_solve(const MFGProblem& problem, const PicardOptions& opts) {
  problem.validate();
  opts.validate();
  const GridSpec& grid = problem.grid;

  IterationReport report;
  report.omega_initial = opts.omega;
  report.omega_final = opts.omega;

  FieldTrajectory m_traj = opts.warm_start_m && opts.warm_start_m->grid() == grid
                               ? *opts.warm_start_m
                               : FieldTrajectory(grid, problem.m0);

  // Dissipation policy: start from the terminal-datum gradient bound, then
  // raise alpha whenever an iterate's |D_pH| bound exceeds it. The final
  // value is frozen into the report so adjoint runs replay the same scheme.
  double alpha = opts.alpha_fixed > 0.0
                     ? opts.alpha_fixed
                     : opts.alpha_margin * dph_bound_frame(problem.uT, problem.params);
  HJBConfig cfg{alpha, opts.lin_tol};

  std::optional<FieldTrajectory> u_traj;
  double omega = opts.omega;
  bool halved = false;
  int budget = opts.max_iter;
  int it = 0;

  while (it < budget) {
    ++it;
    FieldTrajectory g_traj = [&] {
      try {
        return g_eps_trajectory(m_traj, problem.eps);
      } catch (const PositivityError& e) {
        throw PicardPositivityError(
            std::string(e.what()) + " (Picard iteration " + std::to_string(it) + ")", m_traj,
            it);
      }
    }();

    FieldTrajectory u_new = hjb_solve_backward(problem.uT, g_traj, problem.params, cfg);
    if (opts.alpha_fixed <= 0.0) {
      double bound = dph_bound(u_new, problem.params);
      if (opts.alpha_margin * bound > cfg.alpha) {
        cfg.alpha = opts.alpha_margin * bound;
        u_new = hjb_solve_backward(problem.uT, g_traj, problem.params, cfg);
      }
    }

    FieldTrajectory m_tilde = fp_solve_forward(problem.m0, u_new, problem.params, cfg);
    std::vector<ScalarField> damped;
    damped.reserve(grid.nt + 1);
    for (int k = 0; k <= grid.nt; ++k) {
      ScalarField f(grid);
      for (std::size_t i = 0; i < f.size(); ++i)
        f[i] = (1.0 - omega) * m_traj.frame(k)[i] + omega * m_tilde.frame(k)[i];
      damped.push_back(std::move(f));
    }
    FieldTrajectory m_new(grid, std::move(damped));

    double du = u_traj ? sup_traj_distance(u_new, *u_traj)
                       : std::numeric_limits<double>::quiet_NaN();
    double dm = sup_traj_distance(m_new, m_traj);
    report.du_sup.push_back(du);
    report.dm_sup.push_back(dm);

    u_traj = std::move(u_new);
    m_traj = std::move(m_new);

    if (!std::isnan(du) && du <= opts.tol && dm <= opts.tol) {
      report.converged = true;
      break;
    }
    if (it == budget && !halved) {
      halved = true;
      omega *= 0.5;
      budget += opts.max_iter;
      report.omega_halved = true;
    }
  }

  report.iterations = it;
  report.omega_final = omega;
  report.alpha = cfg.alpha;
  if (!report.converged)
    report.note = "not converged after " + std::to_string(it) + " iterations (omega " +
                  std::to_string(omega) + ")";

  MFGSolution sol{std::move(*u_traj), std::move(m_traj), problem.eps, std::move(report)};
  PdeResiduals res = pde_residuals(sol, problem);
  sol.report.hjb_residual = res.hjb;
  sol.report.fp_residual = res.fp;
  return sol;
}

ContinuationResult eps_continuation(const MFGProblem& problem_template, const EpsSchedule& schedule,
                                    const PicardOptions& opts) {
  ContinuationResult out;
  PicardOptions run_opts = opts;
  for (double eps : schedule.values()) {
    MFGProblem p = problem_template;
    p.eps = eps;
    try {
      MFGSolution sol = picard_solve(p, run_opts);
      bool converged = sol.report.converged;
      run_opts.warm_start_m = sol.m;
      out.solutions.push_back(std::move(sol));
      out.eps_done.push_back(eps);
      if (!converged) {
        out.failure = "flagged non-convergence at eps = " + std::to_string(eps);
        return out;
      }
    } catch (const MfgError& e) {
      out.failure = "solver failure at eps = " + std::to_string(eps) + ": " + e.what();
      return out;
    }
  }
  out.completed = true;
  return out;
}

PdeResiduals pde_residuals(const MFGSolution& solution, const MFGProblem& problem) {
  const GridSpec& grid = problem.grid;
  if (!(solution.u.grid() == grid) || !(solution.m.grid() == grid))
    throw MfgError("pde_residuals: solution grids do not match the problem");
  const double dt = grid.dt();
  const double inv2dt = 1.0 / (2.0 * dt);
  double hd = grid.h();
  if (grid.d == 2) hd *= grid.h();

  double hjb_sq = 0.0, fp_sq = 0.0;
  for (int k = 1; k < grid.nt; ++k) {
    const ScalarField& u = solution.u.frame(k);
    const ScalarField& m = solution.m.frame(k);
    VectorField du = gradient_central(u);
    ScalarField lap_u = laplacian(u);
    ScalarField lap_m = laplacian(m);
    ScalarField g = g_eps(m, problem.eps);

    VectorField bm(grid);
    for (std::size_t c = 0; c < grid.cells(); ++c) {
      std::array<double, 2> p{du.comp[0][c], grid.d == 2 ? du.comp[1][c] : 0.0};
      auto dph = problem.params.eval_DpH(grid.point(c), p);
      bm.comp[0][c] = dph[0] * m[c];
      if (grid.d == 2) bm.comp[1][c] = dph[1] * m[c];
    }
    ScalarField div_bm = divergence_central(bm);

    for (std::size_t c = 0; c < grid.cells(); ++c) {
      std::array<double, 2> p{du.comp[0][c], grid.d == 2 ? du.comp[1][c] : 0.0};
      double u_t = (solution.u.frame(k + 1)[c] - solution.u.frame(k - 1)[c]) * inv2dt;
      double m_t = (solution.m.frame(k + 1)[c] - solution.m.frame(k - 1)[c]) * inv2dt;
      double r_h = -u_t + problem.params.eval_H(grid.point(c), p) - lap_u[c] - g[c];
      double r_f = m_t - div_bm[c] - lap_m[c];
      hjb_sq += r_h * r_h * hd * dt;
      fp_sq += r_f * r_f * hd * dt;
    }
  }
  return {std::sqrt(hjb_sq), std::sqrt(fp_sq)};
}

}  // namespace mfglab
