#pragma once

#include <vector>

#include "mfglab/torus_grid.hpp"

namespace mfglab {

/// Thrown when eps + m fails to stay positive; this signals loss of
/// positivity upstream and is never silently clamped.
class PositivityError : public MfgError {
public:
  using MfgError::MfgError;
};

/// Strictly decreasing positive regularization sequence.
class EpsSchedule {
public:
  explicit EpsSchedule(std::vector<double> values);
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

private:
  std::vector<double> values_;
};

/// Pointwise ln(eps + m). Requires min(m) + eps > 0.
ScalarField g_eps(const ScalarField& m, double eps);

/// max over time levels of || ln(eps + m(.,t)) ||_{L^p}.
double g_norm_linf_lp(const FieldTrajectory& m_traj, double eps, double p);

/// Integral of 1/(m + eps) over the torus.
double inverse_mass(const ScalarField& m, double eps);

/// A = e^(1-p): (ln z)^p is concave for z > 1/A = e^(p-1).
double concavity_threshold(double p);

/// Per-frame integral of |ln(m+eps)|^p and its split over {m+eps <= 1} and
/// {m+eps > 1}. By construction total = low + high exactly.
struct LogIntegrabilityRow {
  double total = 0.0;
  double low = 0.0;   ///< contribution of the region m + eps <= 1
  double high = 0.0;  ///< contribution of the region m + eps > 1
};
std::vector<LogIntegrabilityRow> log_integrability(const FieldTrajectory& m_traj, double eps,
                                                   double p);

}  // namespace mfglab
