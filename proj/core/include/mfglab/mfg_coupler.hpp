#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mfglab/fokker_planck.hpp"
#include "mfglab/hamiltonian.hpp"
#include "mfglab/hjb_solver.hpp"
#include "mfglab/log_nonlinearity.hpp"
#include "mfglab/torus_grid.hpp"

namespace mfglab {

/// A regularized problem instance: data (m0, uT), coupling ln(eps + m).
struct MFGProblem {
  GridSpec grid;
  HamiltonianParams params;
  ScalarField m0;
  ScalarField uT;
  double eps = 0.0;

  void validate() const;
};

struct IterationReport {
  std::vector<double> du_sup;  ///< sup|u_{k+1} - u_k| per iteration (first entry is NaN)
  std::vector<double> dm_sup;  ///< sup|m_{k+1} - m_k| per iteration
  double omega_initial = 0.5;
  double omega_final = 0.5;
  bool omega_halved = false;
  bool converged = false;
  int iterations = 0;
  double alpha = 0.0;  ///< Lax-Friedrichs dissipation frozen for the run
  double hjb_residual = 0.0;
  double fp_residual = 0.0;
  std::string note;
};

struct MFGSolution {
  FieldTrajectory u;
  FieldTrajectory m;
  double eps = 0.0;
  IterationReport report;
};

struct PicardOptions {
  double omega = 0.5;      ///< damping on m, in (0, 1]
  double tol = 1e-9;       ///< sup-norm stopping tolerance on both updates
  int max_iter = 100;
  double lin_tol = 1e-8;
  double alpha_fixed = -1.0;   ///< > 0 pins alpha; otherwise calibrated per run
  double alpha_margin = 1.1;   ///< safety factor over the sampled |D_pH| bound
  std::optional<FieldTrajectory> warm_start_m;  ///< initial m iterate

  void validate() const;
};

/// Positivity loss inside the Picard loop; carries the offending density
/// iterate so drivers can dump it next to their other outputs.
class PicardPositivityError : public PositivityError {
public:
  PicardPositivityError(const std::string& msg, FieldTrajectory iterate, int iteration)
      : PositivityError(msg), m_iterate(std::move(iterate)), iteration(iteration) {}
  FieldTrajectory m_iterate;
  int iteration = 0;
};

/// Damped Picard iteration on the regularized system: given m_k, solve the
/// HJB equation backward with source ln(eps + m_k), push m0 forward under the
/// new control, damp, repeat. Non-convergence halves omega once and retries
/// for up to max_iter further sweeps before returning a flagged report.
MFGSolution picard_solve(const MFGProblem& problem, const PicardOptions& opts);

/// Warm-started continuation along a decreasing eps schedule. Stops at the
/// first failed solve; per-eps outcomes are always reported.
struct ContinuationResult {
  std::vector<MFGSolution> solutions;   ///< one per completed eps
  std::vector<double> eps_done;
  bool completed = false;
  std::string failure;                   ///< empty unless the run stopped early
};
ContinuationResult eps_continuation(const MFGProblem& problem_template, const EpsSchedule& schedule,
                                    const PicardOptions& opts);

/// Discrete L2(space-time) residuals of both equations, centered second-order
/// stencils in space and time (interior time levels).
struct PdeResiduals {
  double hjb = 0.0;
  double fp = 0.0;
};
PdeResiduals pde_residuals(const MFGSolution& solution, const MFGProblem& problem);

}  // namespace mfglab
