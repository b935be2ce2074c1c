#pragma once

#include <memory>
#include <vector>

#include "mfglab/torus_grid.hpp"

namespace mfglab {

/// Direct solver for the periodic implicit-diffusion system
///   (I - c * Laplacian_h) x = rhs,  c >= 0,
/// on a GridSpec: cyclic tridiagonal factorization in 1-d, discrete Fourier
/// diagonalization in 2-d. Both paths are exact up to roundoff; the residual
/// of the last solve is kept so callers can audit against their tolerance.
///
/// A single instance is not reentrant (the 2-d path owns FFT buffers);
/// concurrent runs must use distinct instances.
class PeriodicDiffusionSolver {
public:
  PeriodicDiffusionSolver(const GridSpec& grid, double c);
  ~PeriodicDiffusionSolver();

  PeriodicDiffusionSolver(const PeriodicDiffusionSolver&) = delete;
  PeriodicDiffusionSolver& operator=(const PeriodicDiffusionSolver&) = delete;

  ScalarField solve(const ScalarField& rhs) const;
  double c() const { return c_; }
  /// Max-norm residual of the most recent solve.
  double last_residual() const { return last_residual_; }

private:
  GridSpec grid_;
  double c_ = 0.0;
  mutable double last_residual_ = 0.0;
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace mfglab
