// mfglab: configuration-driven driver for the torus mean-field game lab.
//
// Subcommands: solve | sweep-eps | verify | mms | exponents | particles.
// Exit codes: 0 success, 1 error, 2 flagged non-convergence.

#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "mfglab/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for torus mean-field games with logarithmic coupling"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 1;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "run configuration file")->required();
    cmd->add_option("--out", out_dir, "output directory (overrides [output] dir)");
    cmd->add_option("--threads", threads, "worker threads for parallel sections");
    cmd->add_option("--seed", seed, "particle RNG seed override")
        ->each([&](const std::string&) { seed_set = true; });
  };

  CLI::App* c_solve = app.add_subcommand("solve", "solve one regularized problem");
  CLI::App* c_sweep = app.add_subcommand("sweep-eps", "continuation sweep with estimate report");
  CLI::App* c_verify = app.add_subcommand("verify", "run the full verification suite");
  CLI::App* c_mms = app.add_subcommand("mms", "manufactured-solution order study");
  CLI::App* c_expo = app.add_subcommand("exponents", "exact-rational exponent witnesses");
  CLI::App* c_part = app.add_subcommand("particles", "Monte Carlo cross-validation");
  for (CLI::App* c : {c_solve, c_sweep, c_verify, c_mms, c_expo, c_part}) add_common(c);

  CLI11_PARSE(app, argc, argv);

  mfglab::RunConfig cfg;
  try {
    cfg = mfglab::parse_config_file(config_path);
  } catch (const std::exception& e) {
    std::cerr << "config: " << e.what() << "\n";
    return mfglab::kExitError;
  }

  mfglab::RunOverrides ov;
  if (!out_dir.empty()) ov.out_dir = out_dir;
  if (seed_set) ov.seed = seed;
  ov.threads = threads;

  if (app.got_subcommand(c_solve)) return mfglab::run_solve(cfg, ov, std::cout, std::cerr);
  if (app.got_subcommand(c_sweep)) return mfglab::run_sweep_eps(cfg, ov, std::cout, std::cerr);
  if (app.got_subcommand(c_verify)) return mfglab::run_verify(cfg, ov, std::cout, std::cerr);
  if (app.got_subcommand(c_mms)) return mfglab::run_mms(cfg, ov, std::cout, std::cerr);
  if (app.got_subcommand(c_expo)) return mfglab::run_exponents(cfg, ov, std::cout, std::cerr);
  if (app.got_subcommand(c_part)) return mfglab::run_particles(cfg, ov, std::cout, std::cerr);
  return mfglab::kExitError;
}
