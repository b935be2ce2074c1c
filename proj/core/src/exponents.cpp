#include "mfglab/exponents.hpp"

#include <cmath>
#include <sstream>

namespace mfglab {

std::string to_fraction_string(const Rational& r) {
  std::ostringstream os;
  os << boost::multiprecision::numerator(r) << '/' << boost::multiprecision::denominator(r);
  return os.str();
}

namespace {

// cpp_int's string constructor treats a leading 0 as an octal prefix.
boost::multiprecision::cpp_int parse_int_token(std::string s) {
  bool neg = false;
  if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
    neg = s[0] == '-';
    s.erase(s.begin());
  }
  while (s.size() > 1 && s[0] == '0') s.erase(s.begin());
  if (s.empty()) throw MfgError("parse_fraction: empty integer token");
  boost::multiprecision::cpp_int v(s);
  return neg ? -v : v;
}

}  // namespace

Rational parse_fraction(const std::string& text) {
  auto slash = text.find('/');
  try {
    if (slash == std::string::npos) {
      auto dot = text.find('.');
      if (dot == std::string::npos) return Rational(parse_int_token(text));
      // decimal literal: digits.digits -> exact rational
      std::string digits = text.substr(0, dot) + text.substr(dot + 1);
      Rational num(parse_int_token(digits));
      Rational den = 1;
      for (std::size_t i = 0; i < text.size() - dot - 1; ++i) den *= 10;
      return num / den;
    }
    Rational num(parse_int_token(text.substr(0, slash)));
    Rational den(parse_int_token(text.substr(slash + 1)));
    if (den == 0) throw MfgError("parse_fraction: zero denominator in '" + text + "'");
    return num / den;
  } catch (const MfgError&) {
    throw;
  } catch (const std::exception&) {
    throw MfgError("parse_fraction: cannot parse rational '" + text + "'");
  }
}

bool rho_exponents_hypothesis_holds(int d, const Rational& q, const Rational& b, const Rational& lam) {
  if (d < 3) return false;
  if (!(q >= 1 && b >= 1)) return false;
  if (!(lam > 0 && lam < 1)) return false;
  Rational denom = b * d - 2 * lam;  // positive because b >= 1, d >= 3, lam < 1
  return q * denom < Rational(d) * b;
}

void ExponentWitnessA::verify() const {
  if (d < 3) throw MfgError("ExponentWitnessA: d must be >= 3");
  if (sobolev_conj != Rational(2 * d) / (d - 2))
    throw MfgError("ExponentWitnessA: wrong Sobolev conjugate");
  if (!(M >= 1)) throw MfgError("ExponentWitnessA: M < 1");
  if (!(a >= 1)) throw MfgError("ExponentWitnessA: a < 1");
  if (!(Q >= q)) throw MfgError("ExponentWitnessA: Q < q");
  if (!(kappa > 0 && kappa < 1)) throw MfgError("ExponentWitnessA: kappa outside (0,1)");
  if (!(nu > 0 && nu < 1)) throw MfgError("ExponentWitnessA: nu outside (0,1)");
  if (Rational(1) / M != lam / b) throw MfgError("ExponentWitnessA: 1/M = lam/b violated");
  if (Rational(1) / Q != 1 - lam + lam / a)
    throw MfgError("ExponentWitnessA: 1/Q = 1-lam+lam/a violated");
  if (Rational(1) / a != 1 - kappa + 2 * kappa / (sobolev_conj * nu))
    throw MfgError("ExponentWitnessA: 1/a relation violated");
  if (!(kappa * b / nu <= 1)) throw MfgError("ExponentWitnessA: kappa*b/nu > 1");
}

ExponentWitnessA feasible_rho_exponents(int d, const Rational& q, const Rational& b,
                                  const Rational& lam) {
  if (d < 3)
    throw MfgError("feasible_rho_exponents: d must be an integer >= 3 (Sobolev conjugate requires d > 2)");
  if (!rho_exponents_hypothesis_holds(d, q, b, lam))
    throw MfgError("feasible_rho_exponents: hypothesis q,b >= 1, 0 < lam < 1, q < d b/(b d - 2 lam) "
                   "violated");

  const Rational two_star = Rational(2 * d) / (d - 2);
  const Rational nu_floor = Rational(d - 2) / d;

  // For fixed nu, Q >= q is equivalent to kappa >= kappa_lo with
  //   kappa_lo = (1 - 1/q) / (lam * s(nu)),  s(nu) = 1 - (d-2)/(d nu),
  // and the remaining caps are kappa <= nu/b and kappa < 1. The hypothesis
  // makes the interval nonempty once nu is close enough to 1.
  for (int j = 1; j <= 512; ++j) {
    Rational dyadic = Rational(1) / Rational(boost::multiprecision::cpp_int(1) << j);
    Rational nu = 1 - dyadic;
    if (!(nu > nu_floor)) continue;
    Rational s = 1 - Rational(d - 2) / (Rational(d) * nu);
    if (!(s > 0)) continue;
    Rational kappa_lo = q > 1 ? (1 - Rational(1) / q) / (lam * s) : Rational(0);
    Rational kappa_hi = nu / b;
    Rational one_minus = 1 - dyadic;
    if (kappa_hi > one_minus) kappa_hi = one_minus;
    if (kappa_lo > kappa_hi) continue;
    Rational kappa = (kappa_lo + kappa_hi) / 2;
    if (!(kappa > 0)) continue;

    ExponentWitnessA w;
    w.d = d;
    w.q = q;
    w.b = b;
    w.lam = lam;
    w.sobolev_conj = two_star;
    w.M = b / lam;
    w.nu = nu;
    w.kappa = kappa;
    Rational inv_a = 1 - kappa + 2 * kappa / (two_star * nu);
    w.a = 1 / inv_a;
    Rational inv_Q = 1 - lam + lam * inv_a;
    w.Q = 1 / inv_Q;
    w.verify();
    return w;
  }
  throw MfgError("feasible_rho_exponents: dyadic search exhausted (defect: the hypothesis guarantees "
                 "feasibility)");
}

void ExponentWitnessB::verify() const {
  if (d < 3) throw MfgError("ExponentWitnessB: d must be >= 3");
  if (sobolev_conj != Rational(2 * d) / (d - 2))
    throw MfgError("ExponentWitnessB: wrong Sobolev conjugate");
  if (!(qt >= 1)) throw MfgError("ExponentWitnessB: qt < 1");
  if (Rational(1) / p + Rational(1) / qt != Rational(1) / 2)
    throw MfgError("ExponentWitnessB: 1/p + 1/qt = 1/2 violated");
  if (!(nu > 0 && nu < 1)) throw MfgError("ExponentWitnessB: nu outside (0,1)");
  if (!(theta > 0 && theta < 1)) throw MfgError("ExponentWitnessB: theta outside (0,1)");
  if (theta != nu / (2 - nu)) throw MfgError("ExponentWitnessB: theta = nu/(2-nu) violated");
  Rational lhs = Rational(1) / (qt * (2 - nu) / 2);
  if (lhs != 1 - theta + 2 * theta / (sobolev_conj * nu))
    throw MfgError("ExponentWitnessB: interpolation relation violated");
  if (!(b > 1 && b < 2 * lam * p / d))
    throw MfgError("ExponentWitnessB: b outside (1, 2 lam p / d)");
}

ExponentWitnessB feasible_gradient_exponents(int d, const Rational& lam, const Rational& p) {
  if (d < 3)
    throw MfgError("feasible_gradient_exponents: d must be an integer >= 3");
  if (!(lam > 0 && lam < 1)) throw MfgError("feasible_gradient_exponents: lam must lie in (0,1)");
  Rational floor1 = Rational(d) / (2 * lam);
  Rational floor2 = Rational(d);
  if (!(p > floor1 && p > floor2))
    throw MfgError("feasible_gradient_exponents: requires p > max(d/(2 lam), d)");

  ExponentWitnessB w;
  w.d = d;
  w.lam = lam;
  w.p = p;
  w.sobolev_conj = Rational(2 * d) / (d - 2);
  w.qt = 2 * p / (p - 2);
  w.nu = (Rational(d) - p + d * p) / (Rational(d) * p);
  w.theta = w.nu / (2 - w.nu);
  w.b = (1 + 2 * lam * p / d) / 2;
  // Internal invariant failure here is a defect, not an input error.
  w.verify();
  return w;
}

namespace {

std::string line(const std::string& key, const Rational& r) {
  return key + " = " + to_fraction_string(r) + "\n";
}

}  // namespace

std::string witness_to_text(const ExponentWitnessA& w) {
  std::ostringstream os;
  os << "system = interpolation-exponents-A\n"
     << "d = " << w.d << "\n"
     << line("q", w.q) << line("b", w.b) << line("lam", w.lam) << line("M", w.M)
     << line("Q", w.Q) << line("a", w.a) << line("kappa", w.kappa) << line("nu", w.nu)
     << line("sobolev_conj", w.sobolev_conj);
  return os.str();
}

std::string witness_to_text(const ExponentWitnessB& w) {
  std::ostringstream os;
  os << "system = interpolation-exponents-B\n"
     << "d = " << w.d << "\n"
     << line("lam", w.lam) << line("p", w.p) << line("qt", w.qt) << line("theta", w.theta)
     << line("nu", w.nu) << line("b", w.b) << line("sobolev_conj", w.sobolev_conj);
  return os.str();
}

double young_bound(double C, double theta) {
  if (!(C > 0.0) || !std::isfinite(C)) throw MfgError("young_bound: C must be positive");
  if (!(theta >= 0.0 && theta < 1.0))
    throw MfgError("young_bound: theta must lie in [0,1); the bound may not exist otherwise");
  auto f = [&](double x) { return C + C * std::pow(x, theta) - x; };  // >= 0 iff x <= x*
  double lo = C;
  double hi = std::max(2.0 * C, std::pow(2.0 * C, 1.0 / (1.0 - theta))) + 1.0;
  if (f(hi) > 0.0) throw MfgError("young_bound: bracket failure");
  for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, lo); ++it) {
    double mid = 0.5 * (lo + hi);
    if (f(mid) >= 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return lo;  // largest point where x <= C + C x^theta still holds
}

}  // namespace mfglab
