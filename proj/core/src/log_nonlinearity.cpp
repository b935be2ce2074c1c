#include "mfglab/log_nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mfglab {

EpsSchedule::EpsSchedule(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw MfgError("EpsSchedule: empty schedule");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] > 0.0) || !std::isfinite(values_[i]))
      throw MfgError("EpsSchedule: entries must be positive and finite");
    if (i > 0 && !(values_[i] < values_[i - 1]))
      throw MfgError("EpsSchedule: entries must be strictly decreasing");
  }
}

ScalarField g_eps(const ScalarField& m, double eps) {
  if (eps < 0.0) throw MfgError("g_eps: eps must be >= 0");
  double lo = m.min() + eps;
  if (!(lo > 0.0))
    throw PositivityError("g_eps: eps + m <= 0 (min " + std::to_string(lo) +
                          "); positivity lost upstream");
  ScalarField out(m.grid());
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = std::log(eps + m[i]);
  return out;
}

double g_norm_linf_lp(const FieldTrajectory& m_traj, double eps, double p) {
  double best = 0.0;
  for (int k = 0; k < m_traj.frame_count(); ++k)
    best = std::max(best, lp_norm(g_eps(m_traj.frame(k), eps), p));
  return best;
}

double inverse_mass(const ScalarField& m, double eps) {
  double lo = m.min() + eps;
  if (!(lo > 0.0))
    throw PositivityError("inverse_mass: eps + m <= 0 (min " + std::to_string(lo) + ")");
  ScalarField inv(m.grid());
  for (std::size_t i = 0; i < m.size(); ++i) inv[i] = 1.0 / (m[i] + eps);
  return integrate(inv);
}

double concavity_threshold(double p) {
  if (!(p > 0.0)) throw MfgError("concavity_threshold: p must be positive");
  return std::exp(1.0 - p);
}

std::vector<LogIntegrabilityRow> log_integrability(const FieldTrajectory& m_traj, double eps,
                                                   double p) {
  if (!(p >= 1.0)) throw MfgError("log_integrability: p must be >= 1");
  std::vector<LogIntegrabilityRow> rows;
  rows.reserve(m_traj.frame_count());
  const GridSpec& g = m_traj.grid();
  double hd = g.h();
  if (g.d == 2) hd *= g.h();
  for (int k = 0; k < m_traj.frame_count(); ++k) {
    const ScalarField& m = m_traj.frame(k);
    double lo = m.min() + eps;
    if (!(lo > 0.0))
      throw PositivityError("log_integrability: eps + m <= 0 at frame " + std::to_string(k));
    LogIntegrabilityRow row;
    for (std::size_t i = 0; i < m.size(); ++i) {
      double z = m[i] + eps;
      double contrib = std::pow(std::abs(std::log(z)), p) * hd;
      if (z <= 1.0)
        row.low += contrib;
      else
        row.high += contrib;
    }
    row.total = row.low + row.high;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace mfglab
