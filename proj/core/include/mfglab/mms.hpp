#pragma once

#include <string>
#include <vector>

#include "mfglab/hamiltonian.hpp"
#include "mfglab/torus_grid.hpp"

namespace mfglab {

/// Manufactured-solution convergence study: error per refinement level plus
/// the observed order. Spatial studies refine n with dt ~ h^2; temporal
/// studies refine dt at fixed fine n and estimate the order from successive
/// error differences (cancels any dt-independent floor).
struct MmsResult {
  std::string label;
  std::vector<int> ns;
  std::vector<int> nts;
  std::vector<double> errors;  ///< sup over frames and cells of |numeric - exact|
  double observed_order = 0.0;
};

MmsResult mms_hjb_spatial(int levels, int base_n, int base_nt, double T);
MmsResult mms_hjb_temporal(int levels, int n, int base_nt, double T);
MmsResult mms_fp_spatial(int levels, int base_n, int base_nt, double T);
MmsResult mms_fp_temporal(int levels, int n, int base_nt, double T);

std::string format_mms_table(const MmsResult& r);

}  // namespace mfglab
