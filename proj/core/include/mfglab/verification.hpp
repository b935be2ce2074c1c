#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace mfglab {

/// One verification criterion outcome.
struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  double seconds = 0.0;
  std::string detail;
};

/// Runs the full verification suite (solver exactness, conservation, MMS
/// orders, operator duality, representation formula, eps-uniform Lipschitz
/// witness, exponent feasibility, fixed-point bound, transform residual,
/// particle consistency), printing one PASS/FAIL line per criterion.
/// Returns true iff all criteria pass.
bool run_verification(std::ostream& os, int threads = 1);

std::vector<CriterionResult> run_verification_detailed(std::ostream& os, int threads = 1);

}  // namespace mfglab
