#include "mfglab/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace mfglab {

namespace {

double norm2(const std::array<double, 2>& p, int d) {
  return d == 1 ? std::abs(p[0]) : std::hypot(p[0], p[1]);
}

double dot2(const std::array<double, 2>& a, const std::array<double, 2>& b, int d) {
  return d == 1 ? a[0] * b[0] : a[0] * b[0] + a[1] * b[1];
}

}  // namespace

HamiltonianParams::HamiltonianParams(FourierFn a, FourierFn V, double gamma)
    : a_(std::move(a)), v_(std::move(V)), gamma_(gamma) {
  if (a_.dim() != v_.dim()) throw MfgError("HamiltonianParams: a and V dimension mismatch");
  if (!(gamma_ > 1.0)) throw MfgError("HamiltonianParams: gamma must exceed 1");
  if (!a_.all_finite() || !v_.all_finite() || !std::isfinite(gamma_))
    throw MfgError("HamiltonianParams: non-finite coefficient");
  if (!(a_.min_on_dense_grid() > 0.0))
    throw MfgError("HamiltonianParams: a(x) must be strictly positive");
}

double HamiltonianParams::eval_H(const Point& x, const std::array<double, 2>& p) const {
  double p2 = p[0] * p[0] + (dim() == 2 ? p[1] * p[1] : 0.0);
  return a_.eval(x) * std::pow(1.0 + p2, 0.5 * gamma_) + v_.eval(x);
}

std::array<double, 2> HamiltonianParams::eval_DpH(const Point& x,
                                                  const std::array<double, 2>& p) const {
  double p2 = p[0] * p[0] + (dim() == 2 ? p[1] * p[1] : 0.0);
  double s = a_.eval(x) * gamma_ * std::pow(1.0 + p2, 0.5 * gamma_ - 1.0);
  return {s * p[0], dim() == 2 ? s * p[1] : 0.0};
}

std::array<double, 2> HamiltonianParams::eval_DxH(const Point& x,
                                                  const std::array<double, 2>& p) const {
  double p2 = p[0] * p[0] + (dim() == 2 ? p[1] * p[1] : 0.0);
  double pw = std::pow(1.0 + p2, 0.5 * gamma_);
  auto da = a_.grad(x);
  auto dv = v_.grad(x);
  return {da[0] * pw + dv[0], dim() == 2 ? da[1] * pw + dv[1] : 0.0};
}

ScalarField HamiltonianParams::sample_H0(const GridSpec& g) const {
  if (g.d != dim()) throw MfgError("sample_H0: dimension mismatch");
  ScalarField out(g);
  for (std::size_t c = 0; c < g.cells(); ++c) out[c] = eval_H(g.point(c), {0.0, 0.0});
  return out;
}

LegendreResult legendre_lagrangian(const HamiltonianParams& params, const Point& x,
                                   const std::array<double, 2>& v) {
  const int d = params.dim();
  const double av = params.a(x);
  const double Vv = params.V(x);
  const double gamma = params.gamma();
  const double vn = norm2(v, d);

  if (vn == 0.0) return {-(av + Vv), {0.0, 0.0}, 0};

  // The maximizer is p* = -s v/|v| with s >= 0 solving psi(s) = |v|, where
  // psi(s) = a*gamma*s*(1+s^2)^(gamma/2-1) is strictly increasing onto [0,inf).
  auto psi = [&](double s) { return av * gamma * s * std::pow(1.0 + s * s, 0.5 * gamma - 1.0); };
  auto dpsi = [&](double s) {
    double base = std::pow(1.0 + s * s, 0.5 * gamma - 2.0);
    return av * gamma * base * (1.0 + (gamma - 1.0) * s * s);
  };

  double lo = 0.0;
  double hi = 1.0;
  int grow = 0;
  while (psi(hi) < vn) {
    hi *= 2.0;
    if (++grow > 400 || !std::isfinite(hi))
      throw MfgError("legendre_lagrangian: bracket growth failed, last s = " + std::to_string(hi));
  }

  double s = std::min(hi, vn / (av * gamma));  // exact for gamma = 2
  const double tol = 1e-14 * std::max(1.0, vn);
  bool converged = false;
  int iters = 0;
  for (int it = 0; it < 200; ++it) {
    double f = psi(s) - vn;
    if (std::abs(f) <= tol) {
      converged = true;
      iters = it;
      break;
    }
    if (f > 0.0)
      hi = s;
    else
      lo = s;
    double cand = s - f / dpsi(s);
    if (!(cand > lo) || !(cand < hi)) cand = 0.5 * (lo + hi);
    s = cand;
  }
  if (!converged && std::abs(psi(s) - vn) > 1e-10 * std::max(1.0, vn)) {
    std::ostringstream os;
    os << "legendre_lagrangian: inner maximization did not converge; last iterate s = " << s
       << ", residual = " << psi(s) - vn;
    throw MfgError(os.str());
  }

  double L = vn * s - av * std::pow(1.0 + s * s, 0.5 * gamma) - Vv;
  std::array<double, 2> pstar{-s * v[0] / vn, d == 2 ? -s * v[1] / vn : 0.0};
  return {L, pstar, iters};
}

namespace {

struct SampleSet {
  std::vector<Point> xs;
  std::vector<std::array<double, 2>> ps;        // box samples, includes p = 0
  std::vector<std::array<double, 2>> shell_ps;  // extended shell, radii in [10R, 20R]
  std::vector<std::array<double, 2>> dirs;      // unit directions
  double R = 1.0;
};

SampleSet build_samples(int d, double R, int x_per_dim, int p_radii, int p_dirs) {
  SampleSet s;
  s.R = R;
  if (d == 1) {
    for (int i = 0; i < x_per_dim; ++i) s.xs.push_back({static_cast<double>(i) / x_per_dim, 0.0});
    s.dirs = {{1.0, 0.0}, {-1.0, 0.0}};
  } else {
    for (int i = 0; i < x_per_dim; ++i)
      for (int j = 0; j < x_per_dim; ++j)
        s.xs.push_back({static_cast<double>(i) / x_per_dim, static_cast<double>(j) / x_per_dim});
    for (int k = 0; k < p_dirs; ++k) {
      double th = 2.0 * std::numbers::pi * k / p_dirs;
      s.dirs.push_back({std::cos(th), std::sin(th)});
    }
  }
  s.ps.push_back({0.0, 0.0});
  for (int r = 1; r <= p_radii; ++r) {
    double mag = R * r / p_radii;
    for (const auto& e : s.dirs) s.ps.push_back({mag * e[0], mag * e[1]});
  }
  for (int r = 0; r <= 8; ++r) {
    double mag = 10.0 * R * (1.0 + r / 8.0);
    for (const auto& e : s.dirs) s.shell_ps.push_back({mag * e[0], mag * e[1]});
  }
  return s;
}

// Fits the smallest C with lhs <= C*(1 + weight) over the box and extended
// shell, and fails if the x-maxed lhs still outgrows the x-maxed weight
// between radii 10R and 20R, where the asymptotic exponent dominates the
// ratio (pointwise comparison would trip over cancellations at isolated x).
struct GrowthFit {
  double C = 0.0;
  bool growth_ok = true;
  Point worst_x{0.0, 0.0};
  std::array<double, 2> worst_p{0.0, 0.0};
};

template <typename Lhs, typename Weight>
GrowthFit fit_growth_bound(const SampleSet& smp, Lhs&& lhs, Weight&& weight) {
  GrowthFit fit;
  auto scan = [&](const std::vector<std::array<double, 2>>& ps) {
    for (const auto& x : smp.xs)
      for (const auto& p : ps) {
        double c = lhs(x, p) / (1.0 + weight(x, p));
        if (c > fit.C) {
          fit.C = c;
          fit.worst_x = x;
          fit.worst_p = p;
        }
      }
  };
  scan(smp.ps);
  scan(smp.shell_ps);
  const double margin = 1.10;
  for (const auto& e : smp.dirs) {
    std::array<double, 2> p2{20.0 * smp.R * e[0], 20.0 * smp.R * e[1]};
    std::array<double, 2> p1{10.0 * smp.R * e[0], 10.0 * smp.R * e[1]};
    double l2 = 0.0, l1 = 0.0, w2 = 0.0, w1 = 0.0;
    for (const auto& x : smp.xs) {
      l2 = std::max(l2, lhs(x, p2));
      l1 = std::max(l1, lhs(x, p1));
      w2 = std::max(w2, 1.0 + weight(x, p2));
      w1 = std::max(w1, 1.0 + weight(x, p1));
    }
    if (l2 > margin * (l1 / w1) * w2 + 1e-12) {
      fit.growth_ok = false;
      fit.worst_p = p2;
    }
  }
  return fit;
}

}  // namespace

bool AssumptionReport::all_pass() const {
  auto ok = [](const AssumptionCheck& c) { return c.status == CheckStatus::pass; };
  return ok(convexity_coercivity) && ok(lower_growth) && ok(dph_square) && ok(dxh_bound) &&
         ok(gamma_range);
}

AssumptionReport check_assumptions(const HamiltonianParams& params, double R, int x_samples_per_dim,
                                   int p_radii, int p_directions) {
  if (!(R > 0.0)) throw MfgError("check_assumptions: momentum radius R must be positive");
  AssumptionReport rep;
  const int d = params.dim();
  const double gamma = params.gamma();
  SampleSet smp = build_samples(d, R, x_samples_per_dim, p_radii, p_directions);

  // Smoothness holds by construction (truncated Fourier coefficients).
  // Convexity via finite-difference p-Hessians, coercivity via shell growth
  // of H/|p|, sign H >= 0, and the upper growth fit H <= C(1+|p|^gamma).
  {
    auto& chk = rep.convexity_coercivity;
    chk.status = CheckStatus::pass;
    for (const auto& x : smp.xs) {
      for (const auto& p : smp.ps) {
        double pn = norm2(p, d);
        double delta = 1e-4 * std::max(1.0, pn);
        double H = params.eval_H(x, p);
        if (H < 0.0) {
          chk.status = CheckStatus::fail;
          chk.note = "H < 0 at a sample";
          chk.worst_x = x;
          chk.worst_p = p;
        }
        auto Hat = [&](double dp0, double dp1) {
          return params.eval_H(x, {p[0] + dp0, p[1] + dp1});
        };
        bool convex_ok;
        double hxx = (Hat(delta, 0) - 2.0 * H + Hat(-delta, 0)) / (delta * delta);
        if (d == 1) {
          convex_ok = hxx > 0.0;
        } else {
          double hyy = (Hat(0, delta) - 2.0 * H + Hat(0, -delta)) / (delta * delta);
          double hxy = (Hat(delta, delta) - Hat(delta, -delta) - Hat(-delta, delta) +
                        Hat(-delta, -delta)) /
                       (4.0 * delta * delta);
          convex_ok = hxx > 0.0 && hxx * hyy - hxy * hxy > 0.0;
        }
        if (!convex_ok) {
          chk.status = CheckStatus::fail;
          chk.note = "p-Hessian not positive definite at a sample";
          chk.worst_x = x;
          chk.worst_p = p;
        }
      }
      // Coercivity on the extended shell: near gamma = 1 the ratio H/|p|
      // still dips inside the sample box before its asymptotic growth.
      for (const auto& e : smp.dirs) {
        double r_hi = 20.0 * R, r_lo = 10.0 * R;
        std::array<double, 2> pHi{r_hi * e[0], r_hi * e[1]};
        std::array<double, 2> pLo{r_lo * e[0], r_lo * e[1]};
        if (!(params.eval_H(x, pHi) / r_hi > params.eval_H(x, pLo) / r_lo)) {
          chk.status = CheckStatus::fail;
          chk.note = "H/|p| not increasing between the shell radii";
          chk.worst_x = x;
          chk.worst_p = pHi;
        }
      }
    }
    GrowthFit fit = fit_growth_bound(
        smp, [&](const Point& x, const std::array<double, 2>& p) { return params.eval_H(x, p); },
        [&](const Point&, const std::array<double, 2>& p) {
          return std::pow(norm2(p, d), gamma);
        });
    chk.C_offset = fit.C;
    if (!fit.growth_ok) {
      chk.status = CheckStatus::fail;
      chk.note = "H outgrows C(1+|p|^gamma) between radii R/2 and R";
      chk.worst_x = fit.worst_x;
      chk.worst_p = fit.worst_p;
    }
  }

  // Lower growth D_pH.p - H >= c H - C: rate c fit on the extended shell
  // (asymptotically it approaches gamma-1), offset C completing the
  // inequality on every sample (a single shared constant is infeasible at
  // p = 0 for this family, where the left side is -a-V).
  {
    auto& chk = rep.lower_growth;
    double c_fit = std::numeric_limits<double>::infinity();
    for (const auto& x : smp.xs)
      for (const auto& p : smp.shell_ps) {
        double H = params.eval_H(x, p);
        double lhs = dot2(params.eval_DpH(x, p), p, d) - H;
        double ratio = lhs / std::max(H, 1e-12);
        if (ratio < c_fit) {
          c_fit = ratio;
          chk.worst_x = x;
          chk.worst_p = p;
        }
      }
    double C_fit = 0.0;
    for (const auto& x : smp.xs) {
      for (const auto& p : smp.ps) {
        double H = params.eval_H(x, p);
        double lhs = dot2(params.eval_DpH(x, p), p, d) - H;
        C_fit = std::max(C_fit, c_fit * H - lhs);
      }
      for (const auto& p : smp.shell_ps) {
        double H = params.eval_H(x, p);
        double lhs = dot2(params.eval_DpH(x, p), p, d) - H;
        C_fit = std::max(C_fit, c_fit * H - lhs);
      }
    }
    chk.c_growth = c_fit;
    chk.C_offset = C_fit;
    chk.status = c_fit > 0.0 ? CheckStatus::pass : CheckStatus::fail;
    if (chk.status == CheckStatus::fail) chk.note = "no positive growth rate on the outer shell";
  }

  // |D_pH|^2 <= C(1 + |p|^(2(gamma-1))).
  {
    GrowthFit fit = fit_growth_bound(
        smp,
        [&](const Point& x, const std::array<double, 2>& p) {
          auto dp = params.eval_DpH(x, p);
          return dot2(dp, dp, d);
        },
        [&](const Point&, const std::array<double, 2>& p) {
          return std::pow(norm2(p, d), 2.0 * (gamma - 1.0));
        });
    auto& chk = rep.dph_square;
    chk.C_offset = fit.C;
    chk.status = fit.growth_ok ? CheckStatus::pass : CheckStatus::fail;
    chk.worst_x = fit.worst_x;
    chk.worst_p = fit.worst_p;
    if (!fit.growth_ok) chk.note = "|D_pH|^2 outgrows the |p|^(2(gamma-1)) weight";
  }

  // |D_xH| <= C H + C, checked against the weight max(H, 0).
  {
    GrowthFit fit = fit_growth_bound(
        smp,
        [&](const Point& x, const std::array<double, 2>& p) {
          return norm2(params.eval_DxH(x, p), d);
        },
        [&](const Point& x, const std::array<double, 2>& p) {
          return std::max(params.eval_H(x, p), 0.0);
        });
    auto& chk = rep.dxh_bound;
    chk.C_offset = fit.C;
    chk.status = fit.growth_ok ? CheckStatus::pass : CheckStatus::fail;
    chk.worst_x = fit.worst_x;
    chk.worst_p = fit.worst_p;
    if (!fit.growth_ok) chk.note = "|D_xH| outgrows C(H+1)";
  }

  // Exponent range 1 < gamma < 5/4, checked exactly.
  {
    auto& chk = rep.gamma_range;
    chk.status = (gamma > 1.0 && gamma < 1.25) ? CheckStatus::pass : CheckStatus::fail;
    chk.C_offset = gamma;
    if (chk.status == CheckStatus::fail)
      chk.note = "gamma = " + std::to_string(gamma) + " outside (1, 5/4)";
  }

  if (d <= 2)
    rep.dimension_note = "standing hypotheses assume d > 2; run uses d = " + std::to_string(d) +
                         " (exponent systems keep d as a free parameter)";
  return rep;
}

}  // namespace mfglab
