#include "mfglab/linsolve.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

namespace mfglab {

namespace {
// FFTW plan creation/destruction is not thread-safe; execution is.
std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct PeriodicDiffusionSolver::Impl {
  // 1-d cyclic tridiagonal data
  double diag = 1.0, off = 0.0;

  // 2-d FFT data
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  double* real_buf = nullptr;
  fftw_complex* cplx_buf = nullptr;
  std::vector<double> multipliers;  // (I - c*Lap) eigenvalues for r2c layout

  ~Impl() {
    if (fwd || bwd || real_buf || cplx_buf) {
      std::lock_guard<std::mutex> lock(fftw_mutex());
      if (fwd) fftw_destroy_plan(fwd);
      if (bwd) fftw_destroy_plan(bwd);
      if (real_buf) fftw_free(real_buf);
      if (cplx_buf) fftw_free(cplx_buf);
    }
  }
};

PeriodicDiffusionSolver::PeriodicDiffusionSolver(const GridSpec& grid, double c)
    : grid_(grid), c_(c), impl_(std::make_unique<Impl>()) {
  if (!(c >= 0.0) || !std::isfinite(c))
    throw MfgError("PeriodicDiffusionSolver: c must be nonnegative and finite");
  const int n = grid.n;
  const double invh2 = static_cast<double>(n) * n;
  if (grid.d == 1) {
    impl_->diag = 1.0 + 2.0 * c * invh2;
    impl_->off = -c * invh2;
    return;
  }
  std::lock_guard<std::mutex> lock(fftw_mutex());
  impl_->real_buf = fftw_alloc_real(static_cast<std::size_t>(n) * n);
  impl_->cplx_buf = fftw_alloc_complex(static_cast<std::size_t>(n) * (n / 2 + 1));
  impl_->fwd = fftw_plan_dft_r2c_2d(n, n, impl_->real_buf, impl_->cplx_buf, FFTW_ESTIMATE);
  impl_->bwd = fftw_plan_dft_c2r_2d(n, n, impl_->cplx_buf, impl_->real_buf, FFTW_ESTIMATE);
  if (!impl_->fwd || !impl_->bwd) throw MfgError("PeriodicDiffusionSolver: FFTW plan failed");
  impl_->multipliers.resize(static_cast<std::size_t>(n) * (n / 2 + 1));
  for (int k = 0; k < n; ++k) {
    double sk = std::sin(std::numbers::pi * k / n);
    for (int l = 0; l <= n / 2; ++l) {
      double sl = std::sin(std::numbers::pi * l / n);
      impl_->multipliers[static_cast<std::size_t>(k) * (n / 2 + 1) + l] =
          1.0 + 4.0 * c * invh2 * (sk * sk + sl * sl);
    }
  }
}

PeriodicDiffusionSolver::~PeriodicDiffusionSolver() = default;

namespace {

// Thomas algorithm for a strictly tridiagonal system with constant
// coefficients (sub = sup = off) and a per-row diagonal override.
void thomas_const(double off, const std::vector<double>& diag, std::vector<double>& rhs,
                  std::vector<double>& scratch) {
  const std::size_t n = rhs.size();
  scratch.resize(n);
  double beta = diag[0];
  rhs[0] /= beta;
  for (std::size_t i = 1; i < n; ++i) {
    scratch[i] = off / beta;
    beta = diag[i] - off * scratch[i];
    rhs[i] = (rhs[i] - off * rhs[i - 1]) / beta;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= scratch[i + 1] * rhs[i + 1];
}

}  // namespace

ScalarField PeriodicDiffusionSolver::solve(const ScalarField& rhs) const {
  if (!(rhs.grid() == grid_)) throw MfgError("PeriodicDiffusionSolver: grid mismatch");
  if (c_ == 0.0) {
    last_residual_ = 0.0;
    return rhs;
  }
  ScalarField out(grid_);
  const int n = grid_.n;

  if (grid_.d == 1) {
    // Sherman-Morrison correction of the wrap-around entries.
    const double diag = impl_->diag, off = impl_->off;
    const double gamma = -diag;
    std::vector<double> dmod(n, diag);
    dmod[0] = diag - gamma;
    dmod[n - 1] = diag - off * off / gamma;
    std::vector<double> y(rhs.values());
    std::vector<double> scratch;
    thomas_const(off, dmod, y, scratch);
    std::vector<double> z(n, 0.0);
    z[0] = gamma;
    z[n - 1] = off;
    thomas_const(off, dmod, z, scratch);
    double vy = y[0] + (off / gamma) * y[n - 1];
    double vz = z[0] + (off / gamma) * z[n - 1];
    double factor = vy / (1.0 + vz);
    for (int i = 0; i < n; ++i) out[i] = y[i] - factor * z[i];
  } else {
    const std::size_t cells = grid_.cells();
    for (std::size_t i = 0; i < cells; ++i) impl_->real_buf[i] = rhs[i];
    fftw_execute(impl_->fwd);
    const std::size_t nc = static_cast<std::size_t>(n) * (n / 2 + 1);
    for (std::size_t i = 0; i < nc; ++i) {
      impl_->cplx_buf[i][0] /= impl_->multipliers[i];
      impl_->cplx_buf[i][1] /= impl_->multipliers[i];
    }
    fftw_execute(impl_->bwd);
    const double scale = 1.0 / (static_cast<double>(n) * n);
    for (std::size_t i = 0; i < cells; ++i) out[i] = impl_->real_buf[i] * scale;
  }

  // Residual audit: || (I - c Lap) x - rhs ||_inf.
  ScalarField lap = laplacian(out);
  double res = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i)
    res = std::max(res, std::abs(out[i] - c_ * lap[i] - rhs[i]));
  last_residual_ = res;
  return out;
}

}  // namespace mfglab
