#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mfglab/config.hpp"
#include "mfglab/field_io.hpp"
#include "mfglab/runner.hpp"

using namespace mfglab;

namespace {

const char* kConstantCfg = R"cfg(
# constant problem
[problem]
d = 1
n = 64
nt = 100
T = 0.5
gamma = 1.2
eps = 0.0
a = const 1.0
V = const 0.0
m0 = const 1.0
uT = const 0.0

[solver]
omega = 0.6
tol = 1e-11
max_iter = 40
alpha = auto
lin_tol = 1e-8

[output]
dir = out
write_fields = true
)cfg";

std::string temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

std::string slurp(const std::string& path) {
  std::ifstream is(path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("config parsing basics") {
  RunConfig cfg = parse_config_text(kConstantCfg);
  CHECK(cfg.d == 1);
  CHECK(cfg.n == 64);
  CHECK(cfg.nt == 100);
  CHECK(cfg.T == 0.5);
  CHECK(cfg.gamma == 1.2);
  CHECK(cfg.omega == 0.6);
  CHECK(cfg.out_dir == "out");
  MFGProblem prob = cfg.make_problem();
  CHECK(prob.grid.cells() == 64);
}

TEST_CASE("unknown keys and malformed lines are diagnosed with location") {
  try {
    parse_config_text("[problem]\nbogus = 1\n", "test.cfg");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    std::string msg = e.what();
    CHECK(msg.find("test.cfg:2") != std::string::npos);
    CHECK(msg.find("unknown key") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config_text("[nosuch]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[problem]\nn 64\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[problem]\nn = abc\n"), ConfigError);
}

TEST_CASE("fourier function specs") {
  FourierFn f = parse_fourier_fn("const 1.0 cos 1 0.1 sin 2 0.2", 1);
  CHECK(f.eval({0.0, 0.0}) == doctest::Approx(1.1));
  CHECK(f.eval({0.25, 0.0}) == doctest::Approx(1.0 + 0.0 + 0.2 * std::sin(std::numbers::pi)));

  FourierFn f2 = parse_fourier_fn("const 2.0 cos 1 0 0.5", 2);
  CHECK(f2.eval({0.0, 0.7}) == doctest::Approx(2.5));
  CHECK_THROWS_AS(parse_fourier_fn("cos 1", 1), ConfigError);
  CHECK_THROWS_AS(parse_fourier_fn("blend 1 2", 1), ConfigError);
}

TEST_CASE("solve subcommand writes fields and manifest") {
  RunConfig cfg = parse_config_text(kConstantCfg);
  RunOverrides ov;
  ov.out_dir = temp_dir("mfglab_runner_solve");
  std::ostringstream out, err;
  int rc = run_solve(cfg, ov, out, err);
  CHECK(rc == kExitOk);
  CHECK(err.str().empty());

  std::string manifest = slurp(*ov.out_dir + "/manifest.txt");
  CHECK(manifest.find("converged = true") != std::string::npos);
  CHECK(manifest.find("iterations = 2") != std::string::npos);

  FieldTrajectory u = read_field_dump(*ov.out_dir + "/u.mfgf", cfg.T);
  CHECK(u.grid().n == 64);
  CHECK(u.frame_count() == 101);
  std::filesystem::remove_all(*ov.out_dir);
}

TEST_CASE("out-of-range gamma still solves but is flagged in the manifest") {
  RunConfig cfg = parse_config_text(kConstantCfg);
  cfg.gamma = 1.5;
  RunOverrides ov;
  ov.out_dir = temp_dir("mfglab_runner_gamma");
  std::ostringstream out, err;
  int rc = run_solve(cfg, ov, out, err);
  CHECK(rc == kExitOk);
  std::string manifest = slurp(*ov.out_dir + "/manifest.txt");
  CHECK(manifest.find("warning = hypothesis check failed: gamma range") != std::string::npos);
  std::filesystem::remove_all(*ov.out_dir);
}

TEST_CASE("exponents subcommand emits exact fraction witnesses") {
  std::string cfgtext = R"cfg(
[exponents]
witness_a = 3 1/1 1/1 1/2
witness_b = 3 9/10 4
)cfg";
  RunConfig cfg = parse_config_text(cfgtext);
  RunOverrides ov;
  ov.out_dir = temp_dir("mfglab_runner_expo");
  std::ostringstream out, err;
  int rc = run_exponents(cfg, ov, out, err);
  CHECK(rc == kExitOk);
  std::string w = slurp(*ov.out_dir + "/witness_b_0.txt");
  CHECK(w.find("qt = 4/1") != std::string::npos);
  CHECK(w.find("theta = 11/13") != std::string::npos);
  CHECK(w.find("nu = 11/12") != std::string::npos);
  std::string wa = slurp(*ov.out_dir + "/witness_a_0.txt");
  CHECK(wa.find("M = 2/1") != std::string::npos);
  std::filesystem::remove_all(*ov.out_dir);
}

TEST_CASE("sweep subcommand requires a schedule and writes the report") {
  RunConfig cfg = parse_config_text(kConstantCfg);
  std::ostringstream out, err;
  RunOverrides ov;
  ov.out_dir = temp_dir("mfglab_runner_sweep");
  CHECK(run_sweep_eps(cfg, ov, out, err) == kExitError);  // no schedule

  cfg.eps_schedule = {1e-1, 1e-2};
  cfg.n = 32;
  cfg.nt = 64;
  std::ostringstream out2, err2;
  CHECK(run_sweep_eps(cfg, ov, out2, err2) == kExitOk);
  CHECK(std::filesystem::exists(*ov.out_dir + "/report.csv"));
  CHECK(std::filesystem::exists(*ov.out_dir + "/report.columns"));
  std::string csv = slurp(*ov.out_dir + "/report.csv");
  CHECK(csv.find("sup_du") != std::string::npos);
  std::filesystem::remove_all(*ov.out_dir);
}

TEST_CASE("mms subcommand writes the order table") {
  RunConfig cfg = parse_config_text(kConstantCfg);
  cfg.mms_levels = 2;
  cfg.mms_base_n = 32;
  cfg.mms_base_nt = 32;
  RunOverrides ov;
  ov.out_dir = temp_dir("mfglab_runner_mms");
  std::ostringstream out, err;
  CHECK(run_mms(cfg, ov, out, err) == kExitOk);
  std::string table = slurp(*ov.out_dir + "/mms_orders.txt");
  CHECK(table.find("observed order") != std::string::npos);
  CHECK(table.find("fp spatial") != std::string::npos);
  std::filesystem::remove_all(*ov.out_dir);
}

TEST_CASE("particle subcommand writes snapshots and mismatch table") {
  RunConfig cfg = parse_config_text(kConstantCfg);
  cfg.n = 32;
  cfg.nt = 32;
  cfg.T = 0.25;
  cfg.particles_N = 5000;
  cfg.snapshot_fractions = {0.0, 1.0};
  RunOverrides ov;
  ov.out_dir = temp_dir("mfglab_runner_particles");
  std::ostringstream out, err;
  int rc = run_particles(cfg, ov, out, err);
  CHECK(rc == kExitOk);
  CHECK(std::filesystem::exists(*ov.out_dir + "/particles.mfgp"));
  CHECK(std::filesystem::exists(*ov.out_dir + "/density_mismatch.csv"));
  std::filesystem::remove_all(*ov.out_dir);
}
