#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mfglab/mfg_coupler.hpp"
#include "mfglab/torus_grid.hpp"

namespace mfglab {

/// Deterministic per-particle random stream: a splitmix64 generator whose
/// state is derived from (seed, stream index), so serial and parallel
/// simulations agree bit-exactly.
class ParticleRng {
public:
  ParticleRng(std::uint64_t seed, std::uint64_t stream);
  std::uint64_t next_u64();
  double uniform();  ///< in [0,1), 53-bit
  double normal();   ///< standard normal, Box-Muller with cached pair

private:
  std::uint64_t state_;
  bool has_cached_ = false;
  double cached_ = 0.0;
};

struct ParticleSnapshot {
  int level = 0;                 ///< time level of the snapshot
  std::vector<Point> positions;  ///< wrapped into [0,1)^d
};

struct ParticleEnsemble {
  int d = 1;
  std::uint32_t N = 0;
  std::uint64_t seed = 0;
  std::vector<ParticleSnapshot> snapshots;
  std::vector<Point> initial;        ///< initial positions (bucketing)
  std::vector<double> costs;         ///< per-particle running + terminal cost
};

enum class ControlMode { optimal, zero };

struct SimulateOptions {
  std::uint32_t N = 100000;
  std::uint64_t seed = 1;
  std::vector<int> snapshot_levels;  ///< defaults to {0, nt}
  ControlMode control = ControlMode::optimal;
  int threads = 1;
};

/// Euler-Maruyama simulation of dx = -D_pH(x, Du(x,t)) dt + sqrt(2) dW under
/// the solved feedback, drift interpolated (bi)linearly from the grid.
/// Initial positions sampled from m0 (inverse CDF in 1-d, rejection in 2-d).
/// Accumulates each particle's cost int L(x,v*) + g_eps(m) dt + uT(x_T).
ParticleEnsemble simulate(const MFGSolution& solution, const MFGProblem& problem,
                          const SimulateOptions& opts);

/// L1 distance between the mass-normalized histogram of a snapshot and the
/// PDE density at the same level.
double density_mismatch(const ParticleSnapshot& snap, const ScalarField& m);
std::vector<double> density_mismatch(const ParticleEnsemble& ens, const FieldTrajectory& m_traj);

/// Mass-normalized histogram of positions on the grid.
ScalarField histogram_density(const GridSpec& grid, const std::vector<Point>& positions);

struct CostComparison {
  double empirical_mean = 0.0;
  double standard_error = 0.0;
  double bucket_value = 0.0;  ///< m0-weighted mean of u(.,0) over the bucket
  std::size_t count = 0;
};

/// Compares the Monte Carlo cost of particles whose start lies in
/// [bucket_lo, bucket_hi) x (first axis) against the value function.
CostComparison empirical_cost(const ParticleEnsemble& ens, const MFGSolution& solution,
                              const MFGProblem& problem, double bucket_lo, double bucket_hi);

}  // namespace mfglab
