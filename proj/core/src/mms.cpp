#include "mfglab/mms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "mfglab/fokker_planck.hpp"
#include "mfglab/hjb_solver.hpp"

namespace mfglab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

HamiltonianParams mms_params() {
  FourierFn a(1, 1.0);
  a.add_cos({1, 0}, 0.1);
  FourierFn V(1, 0.0);
  V.add_sin({1, 0}, 0.2);
  return HamiltonianParams(a, V, 1.2);
}

double fit_slope(const std::vector<double>& xs, const std::vector<double>& errs) {
  // least-squares slope of log(err) against log(x)
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int n = static_cast<int>(xs.size());
  for (int i = 0; i < n; ++i) {
    double lx = std::log(xs[i]), ly = std::log(errs[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double difference_order(const std::vector<double>& errs) {
  // order from successive differences; immune to a level-independent floor
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 2 < errs.size(); ++i) {
    double d1 = std::abs(errs[i] - errs[i + 1]);
    double d2 = std::abs(errs[i + 1] - errs[i + 2]);
    if (d2 == 0.0) continue;
    worst = std::min(worst, std::log2(d1 / d2));
  }
  return std::isfinite(worst) ? worst : 0.0;
}

struct HjbExact {
  // u*(x,t) = shape(t) * (1 + amp*cos(2 pi x)) + offset(t)
  double amp = 1.0;
  virtual ~HjbExact() = default;
  virtual double shape(double t) const = 0;
  virtual double dshape(double t) const = 0;

  double eval(double x, double t) const { return shape(t) * (1.0 + amp * std::cos(kTwoPi * x)); }
  double dx(double x, double t) const { return -shape(t) * amp * kTwoPi * std::sin(kTwoPi * x); }
  double dt_(double x, double t) const { return dshape(t) * (1.0 + amp * std::cos(kTwoPi * x)); }
  double lap(double x, double t) const {
    return -shape(t) * amp * kTwoPi * kTwoPi * std::cos(kTwoPi * x);
  }
};

struct HjbSpatialExact : HjbExact {
  HjbSpatialExact() { amp = 1.0; }
  double shape(double t) const override { return 1.0 + t; }
  double dshape(double) const override { return 1.0; }
};

struct HjbTemporalExact : HjbExact {
  HjbTemporalExact() { amp = 0.25; }
  double shape(double t) const override { return std::exp(-t); }
  double dshape(double t) const override { return -std::exp(-t); }
};

double run_hjb_case(const HjbExact& exact, int n, int nt, double T) {
  GridSpec grid(1, n, nt, T);
  HamiltonianParams params = mms_params();

  ScalarField uT(grid);
  for (std::size_t c = 0; c < grid.cells(); ++c) uT[c] = exact.eval(grid.point(c)[0], T);

  std::vector<ScalarField> g_frames;
  g_frames.reserve(nt + 1);
  for (int k = 0; k <= nt; ++k) {
    double t = grid.time(k);
    ScalarField g(grid);
    for (std::size_t c = 0; c < grid.cells(); ++c) {
      double x = grid.point(c)[0];
      g[c] = -exact.dt_(x, t) + params.eval_H({x, 0.0}, {exact.dx(x, t), 0.0}) - exact.lap(x, t);
    }
    g_frames.push_back(std::move(g));
  }
  FieldTrajectory g_traj(grid, std::move(g_frames));

  // Dissipation must dominate |D_pH| over the exact gradient range.
  double pmax = 0.0;
  for (std::size_t c = 0; c < grid.cells(); ++c)
    pmax = std::max(pmax, std::abs(exact.dx(grid.point(c)[0], 0.0)) * (1.0 + T));
  double alpha = 0.0;
  for (std::size_t c = 0; c < grid.cells(); ++c) {
    auto dph = params.eval_DpH(grid.point(c), {pmax, 0.0});
    alpha = std::max(alpha, 1.2 * std::abs(dph[0]));
  }
  HJBConfig cfg{alpha, 1e-8};

  FieldTrajectory u = hjb_solve_backward(uT, g_traj, params, cfg);
  double err = 0.0;
  for (int k = 0; k <= nt; ++k) {
    double t = grid.time(k);
    for (std::size_t c = 0; c < grid.cells(); ++c)
      err = std::max(err, std::abs(u.frame(k)[c] - exact.eval(grid.point(c)[0], t)));
  }
  return err;
}

struct FpExact {
  // m*(x,t) = 1 + amp*cos(2 pi x) e^{-t}; drift from u_dr(x,t) sampled on grid
  double amp = 0.5;
  double u_amp = 0.05;

  double eval(double x, double t) const { return 1.0 + amp * std::cos(kTwoPi * x) * std::exp(-t); }
  double dt_(double x, double t) const { return -amp * std::cos(kTwoPi * x) * std::exp(-t); }
  double dx(double x, double t) const { return -amp * kTwoPi * std::sin(kTwoPi * x) * std::exp(-t); }
  double lap(double x, double t) const {
    return -amp * kTwoPi * kTwoPi * std::cos(kTwoPi * x) * std::exp(-t);
  }
  double u_dr(double x, double t) const { return u_amp * std::sin(kTwoPi * x) * (1.0 + t); }
  double u_dr_dx(double x, double t) const { return u_amp * kTwoPi * std::cos(kTwoPi * x) * (1.0 + t); }
};

double run_fp_case(const FpExact& exact, int n, int nt, double T) {
  GridSpec grid(1, n, nt, T);
  HamiltonianParams params = mms_params();

  ScalarField m0(grid);
  for (std::size_t c = 0; c < grid.cells(); ++c) m0[c] = exact.eval(grid.point(c)[0], 0.0);

  std::vector<ScalarField> u_frames, s_frames;
  u_frames.reserve(nt + 1);
  s_frames.reserve(nt + 1);
  for (int k = 0; k <= nt; ++k) {
    double t = grid.time(k);
    ScalarField u(grid), s(grid);
    for (std::size_t c = 0; c < grid.cells(); ++c) {
      double x = grid.point(c)[0];
      u[c] = exact.u_dr(x, t);
      // S = m*_t - div(b m*) - Lap m*, with b = D_pH(x, u_dr_x) analytic.
      double delta = 1e-5;
      auto b_at = [&](double xx) {
        return params.eval_DpH({xx, 0.0}, {exact.u_dr_dx(xx, t), 0.0})[0];
      };
      double div_bm = (b_at(x + delta) * exact.eval(x + delta, t) -
                       b_at(x - delta) * exact.eval(x - delta, t)) /
                      (2.0 * delta);
      s[c] = exact.dt_(x, t) - div_bm - exact.lap(x, t);
    }
    u_frames.push_back(std::move(u));
    s_frames.push_back(std::move(s));
  }
  FieldTrajectory u_traj(grid, std::move(u_frames));

  // Make the source frames exactly mean-free so mass stays conserved.
  std::vector<ScalarField> s_fixed;
  s_fixed.reserve(nt + 1);
  for (auto& s : s_frames) {
    double mean = integrate(s);
    ScalarField f(grid);
    for (std::size_t c = 0; c < grid.cells(); ++c) f[c] = s[c] - mean;
    s_fixed.push_back(std::move(f));
  }
  FieldTrajectory source(grid, std::move(s_fixed));

  double pmax = exact.u_amp * kTwoPi * (1.0 + T);
  double alpha = 0.0;
  for (std::size_t c = 0; c < grid.cells(); ++c) {
    auto dph = params.eval_DpH(grid.point(c), {pmax, 0.0});
    alpha = std::max(alpha, 1.2 * std::abs(dph[0]));
  }
  HJBConfig cfg{alpha, 1e-8};

  FieldTrajectory m = fp_solve_forward(m0, u_traj, params, cfg, &source);
  double err = 0.0;
  for (int k = 0; k <= nt; ++k) {
    double t = grid.time(k);
    for (std::size_t c = 0; c < grid.cells(); ++c)
      err = std::max(err, std::abs(m.frame(k)[c] - exact.eval(grid.point(c)[0], t)));
  }
  return err;
}

}  // namespace

MmsResult mms_hjb_spatial(int levels, int base_n, int base_nt, double T) {
  MmsResult r;
  r.label = "hjb spatial (dt ~ h^2)";
  HjbSpatialExact exact;
  std::vector<double> hs;
  for (int lv = 0; lv < levels; ++lv) {
    int n = base_n << lv;
    int nt = base_nt << (2 * lv);
    r.ns.push_back(n);
    r.nts.push_back(nt);
    hs.push_back(1.0 / n);
    r.errors.push_back(run_hjb_case(exact, n, nt, T));
  }
  r.observed_order = fit_slope(hs, r.errors);
  return r;
}

MmsResult mms_hjb_temporal(int levels, int n, int base_nt, double T) {
  MmsResult r;
  r.label = "hjb temporal (fixed n)";
  HjbTemporalExact exact;
  std::vector<double> dts;
  for (int lv = 0; lv < levels; ++lv) {
    int nt = base_nt << lv;
    r.ns.push_back(n);
    r.nts.push_back(nt);
    dts.push_back(T / nt);
    r.errors.push_back(run_hjb_case(exact, n, nt, T));
  }
  r.observed_order = levels >= 3 ? difference_order(r.errors) : fit_slope(dts, r.errors);
  return r;
}

MmsResult mms_fp_spatial(int levels, int base_n, int base_nt, double T) {
  MmsResult r;
  r.label = "fp spatial (dt ~ h^2)";
  FpExact exact;
  std::vector<double> hs;
  for (int lv = 0; lv < levels; ++lv) {
    int n = base_n << lv;
    int nt = base_nt << (2 * lv);
    r.ns.push_back(n);
    r.nts.push_back(nt);
    hs.push_back(1.0 / n);
    r.errors.push_back(run_fp_case(exact, n, nt, T));
  }
  r.observed_order = fit_slope(hs, r.errors);
  return r;
}

MmsResult mms_fp_temporal(int levels, int n, int base_nt, double T) {
  MmsResult r;
  r.label = "fp temporal (fixed n)";
  FpExact exact;
  std::vector<double> dts;
  for (int lv = 0; lv < levels; ++lv) {
    int nt = base_nt << lv;
    r.ns.push_back(n);
    r.nts.push_back(nt);
    dts.push_back(T / nt);
    r.errors.push_back(run_fp_case(exact, n, nt, T));
  }
  r.observed_order = levels >= 3 ? difference_order(r.errors) : fit_slope(dts, r.errors);
  return r;
}

std::string format_mms_table(const MmsResult& r) {
  std::ostringstream os;
  os << r.label << "\n";
  os << "  n      nt     error\n";
  for (std::size_t i = 0; i < r.errors.size(); ++i) {
    os << "  " << r.ns[i] << "\t" << r.nts[i] << "\t" << r.errors[i] << "\n";
  }
  os << "  observed order: " << r.observed_order << "\n";
  return os.str();
}

}  // namespace mfglab
