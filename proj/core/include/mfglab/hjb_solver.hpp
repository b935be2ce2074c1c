#pragma once

#include <vector>

#include "mfglab/hamiltonian.hpp"
#include "mfglab/torus_grid.hpp"

namespace mfglab {

/// IMEX Euler configuration shared by the HJB and Fokker-Planck steppers.
///
/// The Hamiltonian (resp. advection) term is explicit with a monotone
/// Lax-Friedrichs dissipation of strength `alpha`; diffusion is an implicit
/// periodic solve. The dissipation adds alpha*h/2 of artificial viscosity, so
/// the implicit coefficient is reduced to 1 - alpha*h/2 to keep the scheme
/// second-order consistent in space. `alpha` must dominate max |D_pH| over
/// the gradients the run visits for the explicit operator to be monotone.
struct HJBConfig {
  double alpha = 0.0;
  double lin_tol = 1e-6;  ///< audit tolerance for the implicit solves

  void validate(double h) const;
  /// Implicit diffusion coefficient after viscosity compensation.
  double implicit_coefficient(double h) const { return 1.0 - 0.5 * alpha * h; }
};

/// One backward IMEX Euler step of -u_t + H(x,Du) = Lap u + g from the later
/// time level `u_next` to the earlier one. `g_frame` is the source at the
/// explicit (later) level.
ScalarField hjb_step_backward(const ScalarField& u_next, const ScalarField& g_frame,
                              const HamiltonianParams& params, const HJBConfig& cfg, double dt);

/// Backward sweep with terminal datum u_T; g_traj supplies one source frame
/// per time level (frame k+1 feeds the step onto level k).
FieldTrajectory hjb_solve_backward(const ScalarField& u_T, const FieldTrajectory& g_traj,
                                   const HamiltonianParams& params, const HJBConfig& cfg);

/// Optimal feedback v* = -D_pH(x, Du) per frame, central gradients.
std::vector<VectorField> extract_control(const FieldTrajectory& u_traj,
                                         const HamiltonianParams& params);

/// max over frames and cells of |Du|_2 (central gradient).
double sup_gradient(const FieldTrajectory& u_traj);
double sup_gradient_frame(const ScalarField& u);

/// Max |D_pH(x, Du)| component over all frames, used to calibrate alpha.
double dph_bound(const FieldTrajectory& u_traj, const HamiltonianParams& params);
double dph_bound_frame(const ScalarField& u, const HamiltonianParams& params);

/// Dense materialization of the linearized explicit HJB operator
///   I - dt*(b . grad_c - (alpha*h/2) Lap)
/// at a frozen drift field b = D_pH(x, Du); row-major, cells^2 entries.
std::vector<double> hjb_linearized_explicit_matrix(const GridSpec& grid, const VectorField& drift,
                                                   double alpha, double dt);

}  // namespace mfglab
