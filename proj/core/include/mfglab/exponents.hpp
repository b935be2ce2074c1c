#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

#include "mfglab/torus_grid.hpp"

namespace mfglab {

/// Exact rational arithmetic for the exponent bookkeeping.
using Rational = boost::multiprecision::cpp_rational;

std::string to_fraction_string(const Rational& r);
Rational parse_fraction(const std::string& text);

/// Witness for the interpolation-exponent system
///   1/M = lam/b,  1/Q = 1-lam + lam/a,  1/a = 1-kappa + 2*kappa/(2* nu),
///   kappa*b/nu <= 1,  with M,a >= 1, Q >= q, 0 < kappa < 1, 0 < nu < 1,
/// under the hypothesis q,b >= 1, 0 < lam < 1, q < d*b/(b*d - 2*lam), d >= 3.
struct ExponentWitnessA {
  int d = 3;
  Rational q, b, lam;          // inputs
  Rational M, Q, a, kappa, nu; // outputs
  Rational sobolev_conj;       // 2* = 2d/(d-2)

  /// Re-verifies every defining relation exactly; throws on violation.
  void verify() const;
};

/// True iff (q, b, lam) satisfies the hypothesis exactly for dimension d.
bool rho_exponents_hypothesis_holds(int d, const Rational& q, const Rational& b, const Rational& lam);

/// Finds a witness by exact-rational search: nu ascends toward 1 on a dyadic
/// grid above (d-2)/d; kappa is chosen inside its admissible interval; a and
/// Q follow from the defining relations. Throws MfgError on a hypothesis
/// violation (the system is guaranteed feasible under the hypothesis).
ExponentWitnessA feasible_rho_exponents(int d, const Rational& q, const Rational& b,
                                  const Rational& lam);

/// Witness for the companion system
///   1/p + 1/qt = 1/2 (qt >= 1),   th = nu/(2-nu) in (0,1),   nu in (0,1),
///   1/(qt*(2-nu)/2) = 1-th + 2*th/(2* nu),   1 < b < 2*lam*p/d,
/// solved in closed form: qt = 2p/(p-2), nu = (d-p+dp)/(dp), th = nu/(2-nu),
/// b = (1 + 2*lam*p/d)/2. Requires d >= 3, 0 < lam < 1, p > max(d/(2 lam), d).
struct ExponentWitnessB {
  int d = 3;
  Rational lam, p;            // inputs
  Rational qt, theta, nu, b;  // outputs
  Rational sobolev_conj;

  void verify() const;
};

ExponentWitnessB feasible_gradient_exponents(int d, const Rational& lam, const Rational& p);

/// Text serialization: one "name = num/den" line per field.
std::string witness_to_text(const ExponentWitnessA& w);
std::string witness_to_text(const ExponentWitnessB& w);

/// Largest fixed point x* of x = C + C*x^theta (so x <= C + C*x^theta holds
/// exactly on [0, x*]); bisection to 1e-10, approached from below. Requires
/// C > 0 and 0 <= theta < 1.
double young_bound(double C, double theta);

}  // namespace mfglab
