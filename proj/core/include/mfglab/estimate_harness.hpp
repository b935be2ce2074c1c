#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mfglab/fokker_planck.hpp"
#include "mfglab/log_nonlinearity.hpp"
#include "mfglab/mfg_coupler.hpp"

namespace mfglab {

/// Default duality probe: the cell maximizing |u(.,0)| and tau = 0.
std::size_t default_x0(const MFGSolution& solution);

/// Replays the solved run's scheme configuration for adjoint solves.
HJBConfig harness_config(const MFGSolution& solution);

/// Residual of the duality representation
///   u(x0,tau) = int u_T rho(.,T) + int_tau^T int (D_pH.Du - H + g_eps) rho,
/// with the adjoint started from the grid delta at (x0, tau). Trapezoid time
/// quadrature; all spatial integrals on the run's grid.
double representation_check(const MFGSolution& solution, const MFGProblem& problem,
                            std::size_t x0, int tau);
double representation_check(const MFGSolution& solution, const MFGProblem& problem,
                            std::size_t x0, int tau, const AdjointRun& run);

/// int_tau^T int H(x,Du) rho dx dt.
double h_rho_pairing(const MFGSolution& solution, const MFGProblem& problem, std::size_t x0,
                     int tau);
double h_rho_pairing(const MFGSolution& solution, const MFGProblem& problem,
                     const AdjointRun& run);

/// Time quadrature of per-frame L^q norms of rho over [tau, T].
double rho_l1lq_norm(const AdjointRun& run, double q);

/// Hopf-Cole residual: v = ln(m + eps) must satisfy
///   v_t - D_pH.Dv - div(D_pH) = |Dv|^2 + Lap v
/// up to discretization; returns the L2(space-time) norm of the defect over
/// interior time levels (centered differences).
double hopf_cole_residual(const MFGSolution& solution, const MFGProblem& problem);

/// ln int 1/(m+eps) per frame, its discrete rate, and the smallest C with
///   rate_k <= C (max(|D_pH|^2_inf at the bracketing levels) + 1).
struct InverseMassTrace {
  std::vector<double> log_inverse_mass;  ///< one per time level
  std::vector<double> rates;             ///< one per interval
  double fitted_C = 0.0;
};
InverseMassTrace inverse_mass_trace(const MFGSolution& solution, const MFGProblem& problem);

/// One sweep row per eps value on a fixed grid.
struct EstimateRow {
  double eps = 0.0;
  int d = 1, n = 0, nt = 0;
  bool converged = false;
  int iterations = 0;
  double g_norm = 0.0;            ///< ||ln(eps+m)||_{L^inf L^p}
  double sup_du = 0.0;            ///< sup |Du|
  double h_rho = 0.0;             ///< int int H rho
  double rho_l1lq = 0.0;          ///< ||rho||_{L^1 L^q}
  double inv_mass_log_max = 0.0;  ///< max_t ln int 1/(m+eps)
  double inv_mass_rate_C = 0.0;           ///< fitted rate constant of the inverse-mass trace
  double log_low_kappa = 0.0;       ///< fitted constant of the low-part log bound
  double adjoint_energy = 0.0;    ///< int int |D(rho^(nu/2))|^2
  double duality_residual = 0.0;
  double hopf_cole = 0.0;
};

/// Smallest constants making each monitored inequality hold across the sweep.
struct FittedConstants {
  double sup_du_bound = 0.0;   ///< max sup|Du| (the eps-uniform bound)
  double g_vs_du = 0.0;         ///< g <= C (1 + du^(2(gamma-1)))
  double du_vs_g = 0.0;         ///< du <= C (1 + g + g*du^(2(gamma-1)))
  double energy_vs_du = 0.0;         ///< energy <= C (1 + du^(2(gamma-1)))
  double inv_mass_rate = 0.0;  ///< max of per-run inverse-mass rate constants
  double log_low_kappa = 0.0;    ///< low part <= kappa (1 + [ln inv-mass]_+^p)
};

struct EstimateReport {
  std::vector<EstimateRow> rows;
  FittedConstants fits;
  double p = 2.0, q = 2.0, nu = 0.5;
  std::string note;
};

struct HarnessOptions {
  double p = 2.0;   ///< Lebesgue exponent for the g norm
  double q = 2.0;   ///< Lebesgue exponent for the rho norm
  double nu = 0.5;  ///< adjoint energy exponent
  std::optional<Point> x0;    ///< duality probe; empty = argmax |u(.,0)|
  std::vector<int> taus{0};   ///< probe time levels; rows report the worst residual
  int mollify_cells = 0;      ///< adjoint datum width; 0 = single-cell delta
};

/// Runs eps_continuation on the template and tabulates every monitored
/// quantity per eps, plus the cross-sweep fitted constants.
EstimateReport lipschitz_sweep(const MFGProblem& problem_template, const EpsSchedule& schedule,
                               const PicardOptions& opts, const HarnessOptions& harness);

/// Report rows for solutions computed elsewhere (same tabulation).
EstimateRow evaluate_row(const MFGSolution& solution, const MFGProblem& problem,
                         const HarnessOptions& harness);
FittedConstants fit_constants(const std::vector<EstimateRow>& rows, double gamma);

/// CSV serialization: long format, one row per (eps, grid, quantity), plus a
/// columns manifest next to it.
void write_report_csv(const EstimateReport& report, const std::string& csv_path,
                      const std::string& manifest_path);

}  // namespace mfglab
