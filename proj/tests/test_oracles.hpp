#pragma once

// Test-side oracles, kept independent of the implementation paths they check.

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "mfglab/torus_grid.hpp"

namespace oracles {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Dense midpoint quadrature on [0,1] (periodic integrands).
inline double quad01(const std::function<double(double)>& f, int n = 1 << 20) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += f((i + 0.5) / n);
  return s / n;
}

/// Wrapped heat kernel on the unit circle: solution at time t of rho_t =
/// Lap rho from a unit Dirac at x0 (spectral sum, truncated far below 1e-16).
inline double wrapped_heat_kernel(double x, double x0, double t) {
  double s = 1.0;
  for (int k = 1; k < 2000; ++k) {
    double decay = std::exp(-4.0 * std::numbers::pi * std::numbers::pi * k * k * t);
    if (decay < 1e-18) break;
    s += 2.0 * decay * std::cos(kTwoPi * k * (x - x0));
  }
  return s;
}

/// L2-in-space norm of the wrapped heat kernel at time t (Parseval).
inline double wrapped_heat_l2(double t) {
  double s = 1.0;
  for (int k = 1; k < 2000; ++k) {
    double term = std::exp(-8.0 * std::numbers::pi * std::numbers::pi * k * k * t);
    if (term < 1e-18) break;
    s += 2.0 * term;
  }
  return std::sqrt(s);
}

/// Brute-force grid maximization of phi over [-range, range]^d (d = 1 here),
/// with two refinement passes around the argmax.
inline double grid_maximize(const std::function<double(double)>& phi, double range,
                            int coarse = 4001) {
  double best = -std::numeric_limits<double>::infinity();
  double arg = 0.0;
  for (int i = 0; i < coarse; ++i) {
    double p = -range + 2.0 * range * i / (coarse - 1);
    double v = phi(p);
    if (v > best) {
      best = v;
      arg = p;
    }
  }
  double width = 2.0 * range / (coarse - 1);
  for (int pass = 0; pass < 3; ++pass) {
    double lo = arg - width, hi = arg + width;
    for (int i = 0; i <= 400; ++i) {
      double p = lo + (hi - lo) * i / 400.0;
      double v = phi(p);
      if (v > best) {
        best = v;
        arg = p;
      }
    }
    width = (hi - lo) / 200.0;
  }
  return best;
}

/// Smooth random periodic field from a few low Fourier modes.
inline mfglab::ScalarField random_smooth_field(const mfglab::GridSpec& g, std::mt19937_64& rng,
                                               double amplitude = 1.0) {
  std::uniform_real_distribution<double> coef(-amplitude, amplitude);
  mfglab::ScalarField f(g);
  double a1 = coef(rng), b1 = coef(rng), a2 = coef(rng), b2 = coef(rng);
  double c1 = coef(rng), c2 = coef(rng);
  for (std::size_t i = 0; i < g.cells(); ++i) {
    auto x = g.point(i);
    double v = a1 * std::cos(kTwoPi * x[0]) + b1 * std::sin(kTwoPi * x[0]) +
               a2 * std::cos(2 * kTwoPi * x[0]) + b2 * std::sin(2 * kTwoPi * x[0]);
    if (g.d == 2)
      v += c1 * std::cos(kTwoPi * x[1]) + c2 * std::sin(kTwoPi * (x[0] + x[1]));
    f[i] = v;
  }
  return f;
}

}  // namespace oracles
