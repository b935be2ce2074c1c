#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "mfglab/config.hpp"

namespace mfglab {

/// Command-line overrides shared by every subcommand.
struct RunOverrides {
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  int threads = 1;
};

/// Exit codes: 0 success, 1 error, 2 flagged non-convergence.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNotConverged = 2;

int run_solve(const RunConfig& cfg, const RunOverrides& ov, std::ostream& out,
              std::ostream& err);
int run_sweep_eps(const RunConfig& cfg, const RunOverrides& ov, std::ostream& out,
                  std::ostream& err);
int run_verify(const RunConfig& cfg, const RunOverrides& ov, std::ostream& out,
               std::ostream& err);
int run_mms(const RunConfig& cfg, const RunOverrides& ov, std::ostream& out, std::ostream& err);
int run_exponents(const RunConfig& cfg, const RunOverrides& ov, std::ostream& out,
                  std::ostream& err);
int run_particles(const RunConfig& cfg, const RunOverrides& ov, std::ostream& out,
                  std::ostream& err);

}  // namespace mfglab
