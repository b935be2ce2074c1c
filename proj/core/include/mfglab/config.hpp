#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mfglab/estimate_harness.hpp"
#include "mfglab/exponents.hpp"
#include "mfglab/mfg_coupler.hpp"

namespace mfglab {

class ConfigError : public MfgError {
public:
  using MfgError::MfgError;
};

/// Parsed run configuration. The file format is flat `key = value` lines
/// under [section] headers; '#' starts a comment; unknown sections or keys
/// are rejected with a line diagnostic. See README for the full schema.
struct RunConfig {
  // [problem]
  int d = 1;
  int n = 64;
  int nt = 100;
  double T = 0.5;
  double gamma = 1.2;
  double eps = 0.0;
  std::vector<double> eps_schedule;
  FourierFn a_fn, v_fn, m0_fn, uT_fn;

  // [solver]
  double omega = 0.5;
  double tol = 1e-9;
  int max_iter = 100;
  double alpha_fixed = -1.0;  ///< -1 = auto calibration
  double alpha_margin = 1.1;
  double lin_tol = 1e-8;

  // [harness]
  double p = 2.0;
  double q = 2.0;
  double nu = 0.5;
  std::optional<Point> x0;          ///< empty = auto (argmax |u(.,0)|)
  std::vector<int> tau_levels{0};
  int mollify_cells = 0;

  // [mms]
  int mms_levels = 3;
  int mms_base_n = 32;
  int mms_base_nt = 40;

  // [particles]
  std::uint32_t particles_N = 100000;
  std::uint64_t particles_seed = 1;
  std::vector<double> snapshot_fractions{0.0, 1.0};
  double bucket_lo = 0.25;
  double bucket_hi = 0.75;

  // [exponents]
  struct WitnessAQuery {
    int d;
    Rational q, b, lam;
  };
  struct WitnessBQuery {
    int d;
    Rational lam, p;
  };
  std::vector<WitnessAQuery> witness_a_queries;
  std::vector<WitnessBQuery> witness_b_queries;

  // [output]
  std::string out_dir = "out";
  bool write_fields = true;

  GridSpec make_grid() const;
  HamiltonianParams make_params() const;
  MFGProblem make_problem() const;
  PicardOptions make_picard_options() const;
  HarnessOptions make_harness_options() const;
};

RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<string>");

/// Parses "const c [cos k.. amp] [sin k.. amp] ..." into a FourierFn.
FourierFn parse_fourier_fn(const std::string& text, int d);

}  // namespace mfglab
