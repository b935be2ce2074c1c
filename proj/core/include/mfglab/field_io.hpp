#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mfglab/torus_grid.hpp"

namespace mfglab {

/// Binary field dump: "MFGF", u32 version, u32 d, u32 n, u32 nt, then
/// little-endian float64, row-major within a frame, time-major across frames.
/// A single field is written as a trajectory with nt = 0.
void write_field_dump(const std::string& path, const FieldTrajectory& traj);
void write_field_dump(const std::string& path, const ScalarField& field);
FieldTrajectory read_field_dump(const std::string& path, double T_hint = 1.0);

/// Particle snapshot dump: "MFGP", u32 version, u32 d, u32 N, u32 nsnap, then
/// little-endian float64 positions, snapshot-major, particle-major, component.
void write_particle_dump(const std::string& path, int d, std::uint32_t N,
                         const std::vector<std::vector<Point>>& snapshots);

constexpr std::uint32_t kFieldDumpVersion = 1;

}  // namespace mfglab
