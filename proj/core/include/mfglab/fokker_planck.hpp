#pragma once

#include <vector>

#include "mfglab/hamiltonian.hpp"
#include "mfglab/hjb_solver.hpp"
#include "mfglab/torus_grid.hpp"

namespace mfglab {

/// Thrown when the explicit advection step would violate its positivity CFL
/// bound dt <= h / (2d (alpha + max|drift|)); carries the admissible dt.
class CflError : public MfgError {
public:
  CflError(const std::string& msg, double suggested) : MfgError(msg), suggested_dt(suggested) {}
  double suggested_dt = 0.0;
};

/// Conservative explicit advection: m + dt*(div_c(b m) + (alpha*h/2) Lap m),
/// the exact transpose of the linearized explicit HJB operator at drift b.
ScalarField fp_explicit_apply(const ScalarField& m, const VectorField& drift, double alpha,
                              double dt);

/// Dense materialization of the advection operator above (row-major).
std::vector<double> fp_advection_matrix(const GridSpec& grid, const VectorField& drift,
                                        double alpha, double dt);

/// One forward step of m_t - div(D_pH(x,Du) m) = Lap m; drift from the
/// supplied u frame, diffusion implicit. Enforces the CFL bound and the
/// negativity tolerance -1e-12.
ScalarField fp_step_forward(const ScalarField& m, const ScalarField& u_frame,
                            const HamiltonianParams& params, const HJBConfig& cfg, double dt);

/// Forward sweep from m0 driven by a frozen u trajectory; the step onto level
/// k+1 takes its drift from u at level k+1, pairing it with the HJB step over
/// the same interval. `source`, when given, adds dt * source(level k) to the
/// explicit part of each step (manufactured-solution hook; frames must have
/// zero grid sum for the sweep to stay conservative).
FieldTrajectory fp_solve_forward(const ScalarField& m0, const FieldTrajectory& u_traj,
                                 const HamiltonianParams& params, const HJBConfig& cfg,
                                 const FieldTrajectory* source = nullptr);

/// Adjoint density started from a unit grid delta at cell x0, time level tau.
struct AdjointRun {
  GridSpec grid;
  std::size_t x0 = 0;
  int tau = 0;
  std::vector<ScalarField> frames;  ///< levels tau..nt

  int levels() const { return static_cast<int>(frames.size()); }
  const ScalarField& frame_at_level(int k) const { return frames.at(k - tau); }
};

/// `mollify_cells` = 0 starts from the single-cell delta (value 1/h^d at x0);
/// a positive value replaces it with a wrapped Gaussian of that standard
/// deviation in cells, normalized to unit mass on the grid.
AdjointRun solve_adjoint(std::size_t x0, int tau, const FieldTrajectory& u_traj,
                         const HamiltonianParams& params, const HJBConfig& cfg,
                         int mollify_cells = 0);

/// Time quadrature of the adjoint Dirichlet energy
///   int_tau^T int |D(rho^(nu/2))|^2 dx dt,  0 < nu < 1.
double adjoint_energy(const AdjointRun& run, double nu);

/// Spatial part int |D(f^(nu/2))|^2 dx with central gradients; negative
/// roundoff values of f contribute as zero.
double dirichlet_energy(const ScalarField& f, double nu);

/// Mass tolerance shared by the FP and adjoint invariants.
inline constexpr double kMassTol = 1e-10;
inline constexpr double kNegativityTol = -1e-12;

}  // namespace mfglab
