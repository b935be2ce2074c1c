#include "mfglab/runner.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "mfglab/estimate_harness.hpp"
#include "mfglab/field_io.hpp"
#include "mfglab/mms.hpp"
#include "mfglab/particle_lab.hpp"
#include "mfglab/verification.hpp"

namespace mfglab {

namespace {

namespace fs = std::filesystem;

std::string ensure_out_dir(const RunConfig& cfg, const RunOverrides& ov) {
  std::string dir = ov.out_dir ? *ov.out_dir : cfg.out_dir;
  fs::create_directories(dir);
  return dir;
}

void write_manifest(const std::string& path, const RunConfig& cfg, const MFGSolution* sol,
                    const std::string& extra) {
  std::ofstream os(path);
  if (!os) throw MfgError("cannot write manifest " + path);
  os.precision(17);
  os << "d = " << cfg.d << "\nn = " << cfg.n << "\nnt = " << cfg.nt << "\nT = " << cfg.T
     << "\ngamma = " << cfg.gamma << "\neps = " << cfg.eps << "\na = " << cfg.a_fn.describe()
     << "\nV = " << cfg.v_fn.describe() << "\nm0 = " << cfg.m0_fn.describe()
     << "\nuT = " << cfg.uT_fn.describe() << "\nomega = " << cfg.omega << "\ntol = " << cfg.tol
     << "\nmax_iter = " << cfg.max_iter << "\nlin_tol = " << cfg.lin_tol << "\n";
  if (sol) {
    os << "converged = " << (sol->report.converged ? "true" : "false")
       << "\niterations = " << sol->report.iterations << "\nalpha = " << sol->report.alpha
       << "\nomega_final = " << sol->report.omega_final
       << "\nhjb_residual = " << sol->report.hjb_residual
       << "\nfp_residual = " << sol->report.fp_residual << "\n";
    if (!sol->report.note.empty()) os << "note = " << sol->report.note << "\n";
  }
  if (!extra.empty()) os << extra;
}

std::string assumption_warnings(const RunConfig& cfg) {
  AssumptionReport rep = check_assumptions(cfg.make_params(), 5.0);
  std::ostringstream os;
  auto warn = [&](const char* tag, const AssumptionCheck& c) {
    if (c.status == CheckStatus::fail)
      os << "warning = hypothesis check failed: " << tag
         << (c.note.empty() ? "" : " (" + c.note + ")") << "\n";
  };
  warn("convexity/coercivity/growth", rep.convexity_coercivity);
  warn("lower growth of D_pH.p - H", rep.lower_growth);
  warn("|D_pH|^2 growth", rep.dph_square);
  warn("|D_xH| growth", rep.dxh_bound);
  warn("gamma range (1, 5/4)", rep.gamma_range);
  if (!rep.dimension_note.empty()) os << "note = " << rep.dimension_note << "\n";
  return os.str();
}

}  // namespace

int run_solve(const RunConfig& cfg, const RunOverrides& ov, std::ostream& out,
              std::ostream& err) {
  std::string dir;
  try {
    dir = ensure_out_dir(cfg, ov);
    MFGProblem problem = cfg.make_problem();
    MFGSolution sol = picard_solve(problem, cfg.make_picard_options());
    if (cfg.write_fields) {
      write_field_dump(dir + "/u.mfgf", sol.u);
      write_field_dump(dir + "/m.mfgf", sol.m);
    }
    write_manifest(dir + "/manifest.txt", cfg, &sol, assumption_warnings(cfg));
    out << "solve: " << (sol.report.converged ? "converged" : "NOT converged") << " in "
        << sol.report.iterations << " iterations; residuals hjb " << sol.report.hjb_residual
        << ", fp " << sol.report.fp_residual << "; outputs in " << dir << "\n";
    return sol.report.converged ? kExitOk : kExitNotConverged;
  } catch (const PicardPositivityError& e) {
    err << "solve: error: " << e.what() << "\n";
    if (!dir.empty()) {
      write_field_dump(dir + "/failed_m.mfgf", e.m_iterate);
      err << "solve: offending density iterate dumped to " << dir << "/failed_m.mfgf\n";
    }
    return kExitError;
  } catch (const std::exception& e) {
    err << "solve: error: " << e.what() << "\n";
    return kExitError;
  }
}

int run_sweep_eps(const RunConfig& cfg, const RunOverrides& ov, std::ostream& out,
                  std::ostream& err) {
  try {
    std::string dir = ensure_out_dir(cfg, ov);
    if (cfg.eps_schedule.empty())
      throw ConfigError("sweep-eps requires [problem] eps_schedule");
    EpsSchedule schedule(cfg.eps_schedule);
    MFGProblem tmpl = cfg.make_problem();
    EstimateReport report =
        lipschitz_sweep(tmpl, schedule, cfg.make_picard_options(), cfg.make_harness_options());
    write_report_csv(report, dir + "/report.csv", dir + "/report.columns");
    write_manifest(dir + "/manifest.txt", cfg, nullptr,
                   report.note.empty() ? "" : "note = " + report.note + "\n");
    out << "sweep-eps: " << report.rows.size() << " rows written to " << dir << "/report.csv\n";
    for (const auto& row : report.rows)
      out << "  eps " << row.eps << ": sup|Du| " << row.sup_du << ", g-norm " << row.g_norm
          << ", duality residual " << row.duality_residual << "\n";
    bool all_converged = !report.rows.empty();
    for (const auto& row : report.rows) all_converged = all_converged && row.converged;
    if (!report.note.empty()) out << "  note: " << report.note << "\n";
    return all_converged ? kExitOk : kExitNotConverged;
  } catch (const std::exception& e) {
    err << "sweep-eps: error: " << e.what() << "\n";
    return kExitError;
  }
}

int run_verify(const RunConfig& cfg, const RunOverrides& ov, std::ostream& out,
               std::ostream& err) {
  try {
    std::string dir = ensure_out_dir(cfg, ov);
    std::ostringstream capture;
    bool ok = run_verification(capture, ov.threads);
    out << capture.str();
    std::ofstream log(dir + "/verification.txt");
    log << capture.str();
    return ok ? kExitOk : kExitError;
  } catch (const std::exception& e) {
    err << "verify: error: " << e.what() << "\n";
    return kExitError;
  }
}

int run_mms(const RunConfig& cfg, const RunOverrides& ov, std::ostream& out, std::ostream& err) {
  try {
    std::string dir = ensure_out_dir(cfg, ov);
    MmsResult hs = mms_hjb_spatial(cfg.mms_levels, cfg.mms_base_n, cfg.mms_base_nt, 0.25);
    MmsResult ht = mms_hjb_temporal(cfg.mms_levels, 128, 64, 0.25);
    MmsResult fs = mms_fp_spatial(cfg.mms_levels, cfg.mms_base_n, cfg.mms_base_nt, 0.25);
    MmsResult ft = mms_fp_temporal(cfg.mms_levels, 128, 128, 0.25);
    std::ostringstream table;
    table << format_mms_table(hs) << format_mms_table(ht) << format_mms_table(fs)
          << format_mms_table(ft);
    out << table.str();
    std::ofstream f(dir + "/mms_orders.txt");
    f << table.str();
    return kExitOk;
  } catch (const std::exception& e) {
    err << "mms: error: " << e.what() << "\n";
    return kExitError;
  }
}

int run_exponents(const RunConfig& cfg, const RunOverrides& ov, std::ostream& out,
                  std::ostream& err) {
  try {
    std::string dir = ensure_out_dir(cfg, ov);
    if (cfg.witness_a_queries.empty() && cfg.witness_b_queries.empty())
      throw ConfigError("exponents: no [exponents] witness_a/witness_b queries in config");
    int idx = 0;
    for (const auto& q : cfg.witness_a_queries) {
      ExponentWitnessA w = feasible_rho_exponents(q.d, q.q, q.b, q.lam);
      std::string path = dir + "/witness_a_" + std::to_string(idx++) + ".txt";
      std::ofstream f(path);
      f << witness_to_text(w);
      out << "witness_a(d=" << q.d << ", q=" << to_fraction_string(q.q)
          << ", b=" << to_fraction_string(q.b) << ", lam=" << to_fraction_string(q.lam)
          << "): witness -> " << path << "\n";
    }
    idx = 0;
    for (const auto& q : cfg.witness_b_queries) {
      ExponentWitnessB w = feasible_gradient_exponents(q.d, q.lam, q.p);
      std::string path = dir + "/witness_b_" + std::to_string(idx++) + ".txt";
      std::ofstream f(path);
      f << witness_to_text(w);
      out << "witness_b(d=" << q.d << ", lam=" << to_fraction_string(q.lam)
          << ", p=" << to_fraction_string(q.p) << "): qt=" << to_fraction_string(w.qt)
          << " theta=" << to_fraction_string(w.theta) << " nu=" << to_fraction_string(w.nu)
          << " -> " << path << "\n";
    }
    return kExitOk;
  } catch (const std::exception& e) {
    err << "exponents: error: " << e.what() << "\n";
    return kExitError;
  }
}

int run_particles(const RunConfig& cfg, const RunOverrides& ov, std::ostream& out,
                  std::ostream& err) {
  try {
    std::string dir = ensure_out_dir(cfg, ov);
    MFGProblem problem = cfg.make_problem();
    MFGSolution sol = picard_solve(problem, cfg.make_picard_options());
    if (!sol.report.converged) {
      err << "particles: PDE solve did not converge\n";
      return kExitNotConverged;
    }
    SimulateOptions opts;
    opts.N = cfg.particles_N;
    opts.seed = ov.seed ? *ov.seed : cfg.particles_seed;
    opts.threads = ov.threads;
    for (double frac : cfg.snapshot_fractions)
      opts.snapshot_levels.push_back(
          static_cast<int>(std::lround(frac * problem.grid.nt)));
    ParticleEnsemble ens = simulate(sol, problem, opts);

    std::vector<std::vector<Point>> snaps;
    for (const auto& s : ens.snapshots) snaps.push_back(s.positions);
    write_particle_dump(dir + "/particles.mfgp", problem.grid.d, ens.N, snaps);

    std::ofstream table(dir + "/density_mismatch.csv");
    table << "level,time,l1_mismatch\n";
    table.precision(17);
    auto mism = density_mismatch(ens, sol.m);
    for (std::size_t i = 0; i < mism.size(); ++i) {
      int lv = ens.snapshots[i].level;
      table << lv << ',' << problem.grid.time(lv) << ',' << mism[i] << '\n';
      out << "particles: level " << lv << " L1 mismatch " << mism[i] << "\n";
    }
    CostComparison cost = empirical_cost(ens, sol, problem, cfg.bucket_lo, cfg.bucket_hi);
    out << "particles: bucket [" << cfg.bucket_lo << ", " << cfg.bucket_hi << ") cost "
        << cost.empirical_mean << " +- " << cost.standard_error << " vs value "
        << cost.bucket_value << " (n = " << cost.count << ")\n";
    std::ostringstream extra;
    extra.precision(17);
    extra << "particles_N = " << ens.N << "\nparticles_seed = " << ens.seed
          << "\nbucket_cost = " << cost.empirical_mean << "\nbucket_se = "
          << cost.standard_error << "\nbucket_value = " << cost.bucket_value << "\n";
    write_manifest(dir + "/manifest.txt", cfg, &sol, extra.str());
    return kExitOk;
  } catch (const std::exception& e) {
    err << "particles: error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace mfglab
