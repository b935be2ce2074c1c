#include "mfglab/estimate_harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace mfglab {

std::size_t default_x0(const MFGSolution& solution) {
  const ScalarField& u0 = solution.u.frame(0);
  std::size_t best = 0;
  double bestv = -1.0;
  for (std::size_t i = 0; i < u0.size(); ++i)
    if (std::abs(u0[i]) > bestv) {
      bestv = std::abs(u0[i]);
      best = i;
    }
  return best;
}

HJBConfig harness_config(const MFGSolution& solution) {
  return HJBConfig{solution.report.alpha, 1e-8};
}

namespace {

// Pointwise D_pH(x, Du) and the duality integrand D_pH.Du - H + g at level k.
ScalarField duality_integrand(const MFGSolution& solution, const MFGProblem& problem, int k) {
  const GridSpec& grid = problem.grid;
  const ScalarField& u = solution.u.frame(k);
  VectorField du = gradient_central(u);
  ScalarField g = g_eps(solution.m.frame(k), problem.eps);
  ScalarField out(grid);
  for (std::size_t c = 0; c < grid.cells(); ++c) {
    std::array<double, 2> p{du.comp[0][c], grid.d == 2 ? du.comp[1][c] : 0.0};
    auto dph = problem.params.eval_DpH(grid.point(c), p);
    double dotv = dph[0] * p[0] + (grid.d == 2 ? dph[1] * p[1] : 0.0);
    out[c] = dotv - problem.params.eval_H(grid.point(c), p) + g[c];
  }
  return out;
}

}  // namespace

double representation_check(const MFGSolution& solution, const MFGProblem& problem,
                            std::size_t x0, int tau, const AdjointRun& run) {
  const GridSpec& grid = problem.grid;
  if (tau < 0 || tau >= grid.nt)
    throw MfgError("representation_check: tau must satisfy 0 <= tau < nt");
  if (run.tau != tau)
    throw MfgError("representation_check: probe time level does not match the run");
  const double dt = grid.dt();

  double time_integral = 0.0;
  for (int k = tau; k <= grid.nt; ++k) {
    double w = (k == tau || k == grid.nt) ? 0.5 : 1.0;
    time_integral += w * dt * integrate(multiply(duality_integrand(solution, problem, k),
                                                 run.frame_at_level(k)));
  }
  double terminal = integrate(multiply(problem.uT, run.frame_at_level(grid.nt)));
  // pairing u(.,tau) against the datum equals u(x0,tau) exactly for the
  // single-cell delta and generalizes to mollified data
  double u_val = integrate(multiply(solution.u.frame(tau), run.frame_at_level(tau)));
  if (run.x0 != x0) throw MfgError("representation_check: probe cell does not match the run");
  return std::abs(u_val - (terminal + time_integral));
}

double representation_check(const MFGSolution& solution, const MFGProblem& problem,
                            std::size_t x0, int tau) {
  AdjointRun run = solve_adjoint(x0, tau, solution.u, problem.params, harness_config(solution));
  return representation_check(solution, problem, x0, tau, run);
}

double h_rho_pairing(const MFGSolution& solution, const MFGProblem& problem,
                     const AdjointRun& run) {
  const GridSpec& grid = run.grid;
  const double dt = grid.dt();
  double total = 0.0;
  for (int k = run.tau; k <= grid.nt; ++k) {
    VectorField du = gradient_central(solution.u.frame(k));
    ScalarField integrand(grid);
    const ScalarField& rho = run.frame_at_level(k);
    for (std::size_t c = 0; c < grid.cells(); ++c) {
      std::array<double, 2> p{du.comp[0][c], grid.d == 2 ? du.comp[1][c] : 0.0};
      integrand[c] = problem.params.eval_H(grid.point(c), p) * rho[c];
    }
    double w = (k == run.tau || k == grid.nt) ? 0.5 : 1.0;
    total += w * dt * integrate(integrand);
  }
  return total;
}

double h_rho_pairing(const MFGSolution& solution, const MFGProblem& problem, std::size_t x0,
                     int tau) {
  AdjointRun run = solve_adjoint(x0, tau, solution.u, problem.params, harness_config(solution));
  return h_rho_pairing(solution, problem, run);
}

double rho_l1lq_norm(const AdjointRun& run, double q) {
  if (!(q >= 1.0)) throw MfgError("rho_l1lq_norm: q must be >= 1");
  const double dt = run.grid.dt();
  double total = 0.0;
  const int K = run.levels();
  for (int k = 0; k < K; ++k) {
    double w = (k == 0 || k == K - 1) ? 0.5 : 1.0;
    total += w * dt * lp_norm(run.frames[k], q);
  }
  return total;
}

double hopf_cole_residual(const MFGSolution& solution, const MFGProblem& problem) {
  const GridSpec& grid = problem.grid;
  const double dt = grid.dt();
  const double inv2dt = 1.0 / (2.0 * dt);
  double hd = grid.h();
  if (grid.d == 2) hd *= grid.h();

  std::vector<ScalarField> v;
  v.reserve(grid.nt + 1);
  for (int k = 0; k <= grid.nt; ++k) v.push_back(g_eps(solution.m.frame(k), problem.eps));

  double sq = 0.0;
  for (int k = 1; k < grid.nt; ++k) {
    VectorField dv = gradient_central(v[k]);
    ScalarField lap_v = laplacian(v[k]);
    VectorField du = gradient_central(solution.u.frame(k));
    VectorField b(grid);
    for (std::size_t c = 0; c < grid.cells(); ++c) {
      std::array<double, 2> p{du.comp[0][c], grid.d == 2 ? du.comp[1][c] : 0.0};
      auto dph = problem.params.eval_DpH(grid.point(c), p);
      b.comp[0][c] = dph[0];
      if (grid.d == 2) b.comp[1][c] = dph[1];
    }
    ScalarField div_b = divergence_central(b);
    for (std::size_t c = 0; c < grid.cells(); ++c) {
      double v_t = (v[k + 1][c] - v[k - 1][c]) * inv2dt;
      double b_dot_dv = b.comp[0][c] * dv.comp[0][c] +
                        (grid.d == 2 ? b.comp[1][c] * dv.comp[1][c] : 0.0);
      double dv_sq = dv.comp[0][c] * dv.comp[0][c] +
                     (grid.d == 2 ? dv.comp[1][c] * dv.comp[1][c] : 0.0);
      double r = v_t - b_dot_dv - div_b[c] - dv_sq - lap_v[c];
      sq += r * r * hd * dt;
    }
  }
  return std::sqrt(sq);
}

InverseMassTrace inverse_mass_trace(const MFGSolution& solution, const MFGProblem& problem) {
  const GridSpec& grid = problem.grid;
  InverseMassTrace out;
  out.log_inverse_mass.reserve(grid.nt + 1);
  std::vector<double> dph_sq_inf(grid.nt + 1, 0.0);
  for (int k = 0; k <= grid.nt; ++k) {
    out.log_inverse_mass.push_back(std::log(inverse_mass(solution.m.frame(k), problem.eps)));
    VectorField du = gradient_central(solution.u.frame(k));
    double best = 0.0;
    for (std::size_t c = 0; c < grid.cells(); ++c) {
      std::array<double, 2> p{du.comp[0][c], grid.d == 2 ? du.comp[1][c] : 0.0};
      auto dph = problem.params.eval_DpH(grid.point(c), p);
      double s = dph[0] * dph[0] + (grid.d == 2 ? dph[1] * dph[1] : 0.0);
      best = std::max(best, s);
    }
    dph_sq_inf[k] = best;
  }
  const double dt = grid.dt();
  out.rates.reserve(grid.nt);
  double C = 0.0;
  for (int k = 0; k < grid.nt; ++k) {
    double rate = (out.log_inverse_mass[k + 1] - out.log_inverse_mass[k]) / dt;
    out.rates.push_back(rate);
    double weight = std::max(dph_sq_inf[k], dph_sq_inf[k + 1]) + 1.0;
    C = std::max(C, std::max(0.0, rate) / weight);
  }
  out.fitted_C = C;
  return out;
}

EstimateRow evaluate_row(const MFGSolution& solution, const MFGProblem& problem,
                         const HarnessOptions& harness) {
  const GridSpec& grid = problem.grid;
  EstimateRow row;
  row.eps = problem.eps;
  row.d = grid.d;
  row.n = grid.n;
  row.nt = grid.nt;
  row.converged = solution.report.converged;
  row.iterations = solution.report.iterations;
  row.g_norm = g_norm_linf_lp(solution.m, problem.eps, harness.p);
  row.sup_du = sup_gradient(solution.u);

  std::size_t x0 = harness.x0 ? grid.cell_of(*harness.x0) : default_x0(solution);
  std::vector<int> taus = harness.taus.empty() ? std::vector<int>{0} : harness.taus;
  AdjointRun run = solve_adjoint(x0, taus.front(), solution.u, problem.params,
                                 harness_config(solution), harness.mollify_cells);
  row.h_rho = h_rho_pairing(solution, problem, run);
  row.rho_l1lq = rho_l1lq_norm(run, harness.q);
  row.adjoint_energy = adjoint_energy(run, harness.nu);
  row.duality_residual = representation_check(solution, problem, x0, taus.front(), run);
  for (std::size_t t = 1; t < taus.size(); ++t)
    row.duality_residual =
        std::max(row.duality_residual, representation_check(solution, problem, x0, taus[t]));
  row.hopf_cole = hopf_cole_residual(solution, problem);

  InverseMassTrace trace = inverse_mass_trace(solution, problem);
  row.inv_mass_log_max =
      *std::max_element(trace.log_inverse_mass.begin(), trace.log_inverse_mass.end());
  row.inv_mass_rate_C = trace.fitted_C;

  auto rows = log_integrability(solution.m, problem.eps, harness.p);
  double kappa = 0.0;
  for (int k = 0; k <= grid.nt; ++k) {
    double pos = std::max(0.0, trace.log_inverse_mass[k]);
    kappa = std::max(kappa, rows[k].low / (1.0 + std::pow(pos, harness.p)));
  }
  row.log_low_kappa = kappa;
  return row;
}

FittedConstants fit_constants(const std::vector<EstimateRow>& rows, double gamma) {
  FittedConstants f;
  const double expo = 2.0 * (gamma - 1.0);
  for (const auto& r : rows) {
    double du_pow = std::pow(r.sup_du, expo);
    f.sup_du_bound = std::max(f.sup_du_bound, r.sup_du);
    f.g_vs_du = std::max(f.g_vs_du, r.g_norm / (1.0 + du_pow));
    f.du_vs_g = std::max(f.du_vs_g, r.sup_du / (1.0 + r.g_norm + r.g_norm * du_pow));
    f.energy_vs_du = std::max(f.energy_vs_du, r.adjoint_energy / (1.0 + du_pow));
    f.inv_mass_rate = std::max(f.inv_mass_rate, r.inv_mass_rate_C);
    f.log_low_kappa = std::max(f.log_low_kappa, r.log_low_kappa);
  }
  return f;
}

EstimateReport lipschitz_sweep(const MFGProblem& problem_template, const EpsSchedule& schedule,
                               const PicardOptions& opts, const HarnessOptions& harness) {
  EstimateReport report;
  report.p = harness.p;
  report.q = harness.q;
  report.nu = harness.nu;
  ContinuationResult cont = eps_continuation(problem_template, schedule, opts);
  for (std::size_t i = 0; i < cont.solutions.size(); ++i) {
    MFGProblem p = problem_template;
    p.eps = cont.eps_done[i];
    report.rows.push_back(evaluate_row(cont.solutions[i], p, harness));
  }
  if (!cont.failure.empty()) report.note = cont.failure;
  report.fits = fit_constants(report.rows, problem_template.params.gamma());
  return report;
}

void write_report_csv(const EstimateReport& report, const std::string& csv_path,
                      const std::string& manifest_path) {
  std::ofstream os(csv_path);
  if (!os) throw MfgError("write_report_csv: cannot open " + csv_path);
  os << "eps,d,n,nt,quantity,value\n";
  os.precision(17);
  auto emit = [&](const EstimateRow& r, const std::string& name, double v) {
    os << r.eps << ',' << r.d << ',' << r.n << ',' << r.nt << ',' << name << ',' << v << '\n';
  };
  for (const auto& r : report.rows) {
    emit(r, "converged", r.converged ? 1.0 : 0.0);
    emit(r, "iterations", r.iterations);
    emit(r, "g_norm_linf_lp", r.g_norm);
    emit(r, "sup_du", r.sup_du);
    emit(r, "h_rho", r.h_rho);
    emit(r, "rho_l1lq", r.rho_l1lq);
    emit(r, "inv_mass_log_max", r.inv_mass_log_max);
    emit(r, "inv_mass_rate_C", r.inv_mass_rate_C);
    emit(r, "log_low_kappa", r.log_low_kappa);
    emit(r, "adjoint_energy", r.adjoint_energy);
    emit(r, "duality_residual", r.duality_residual);
    emit(r, "hopf_cole_residual", r.hopf_cole);
  }
  auto fitrow = [&](const std::string& name, double v) {
    os << ",,,," << name << ',' << v << '\n';
  };
  fitrow("fit_sup_du_bound", report.fits.sup_du_bound);
  fitrow("fit_g_vs_du", report.fits.g_vs_du);
  fitrow("fit_du_vs_g", report.fits.du_vs_g);
  fitrow("fit_energy_vs_du", report.fits.energy_vs_du);
  fitrow("fit_inv_mass_rate", report.fits.inv_mass_rate);
  fitrow("fit_log_low_kappa", report.fits.log_low_kappa);

  std::ofstream man(manifest_path);
  if (!man) throw MfgError("write_report_csv: cannot open " + manifest_path);
  man << "columns: eps,d,n,nt,quantity,value\n"
      << "p = " << report.p << ", q = " << report.q << ", nu = " << report.nu << "\n"
      << "g_norm_linf_lp: max_t || ln(eps+m) ||_{L^p}\n"
      << "sup_du: sup |Du| over frames and cells (central gradient)\n"
      << "h_rho: int int H(x,Du) rho dx dt from the default (x0, tau=0) probe\n"
      << "rho_l1lq: || rho ||_{L^1(0,T; L^q)}\n"
      << "inv_mass_log_max: max_t ln int 1/(m+eps)\n"
      << "inv_mass_rate_C: smallest C with rate <= C (||D_pH|^2||_inf + 1) per interval\n"
      << "log_low_kappa: smallest kappa with low-part <= kappa (1 + [ln inv-mass]_+^p)\n"
      << "adjoint_energy: int int |D(rho^(nu/2))|^2\n"
      << "duality_residual: representation-formula residual at (x0, tau=0)\n"
      << "hopf_cole_residual: L2 defect of the ln(m+eps) transform identity\n"
      << "fit_*: smallest constants making each monitored inequality hold across the sweep\n";
  if (!report.note.empty()) man << "note: " << report.note << "\n";
}

}  // namespace mfglab
