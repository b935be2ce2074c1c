#include "mfglab/field_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace mfglab {

static_assert(std::endian::native == std::endian::little,
              "field dumps are little-endian; big-endian hosts are not supported");

namespace {

void put_u32(std::ofstream& os, std::uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t get_u32(std::ifstream& is) {
  std::uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

void write_header(std::ofstream& os, const char magic[4], std::uint32_t d, std::uint32_t n,
                  std::uint32_t nt) {
  os.write(magic, 4);
  put_u32(os, kFieldDumpVersion);
  put_u32(os, d);
  put_u32(os, n);
  put_u32(os, nt);
}

}  // namespace

void write_field_dump(const std::string& path, const FieldTrajectory& traj) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw MfgError("write_field_dump: cannot open " + path);
  const GridSpec& g = traj.grid();
  write_header(os, "MFGF", g.d, g.n, g.nt);
  for (int k = 0; k < traj.frame_count(); ++k) {
    const auto& v = traj.frame(k).values();
    os.write(reinterpret_cast<const char*>(v.data()),
             static_cast<std::streamsize>(v.size() * sizeof(double)));
  }
  if (!os) throw MfgError("write_field_dump: write failed for " + path);
}

void write_field_dump(const std::string& path, const ScalarField& field) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw MfgError("write_field_dump: cannot open " + path);
  const GridSpec& g = field.grid();
  write_header(os, "MFGF", g.d, g.n, 0);
  const auto& v = field.values();
  os.write(reinterpret_cast<const char*>(v.data()),
           static_cast<std::streamsize>(v.size() * sizeof(double)));
  if (!os) throw MfgError("write_field_dump: write failed for " + path);
}

FieldTrajectory read_field_dump(const std::string& path, double T_hint) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw MfgError("read_field_dump: cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "MFGF", 4) != 0)
    throw MfgError("read_field_dump: bad magic in " + path);
  std::uint32_t version = get_u32(is);
  if (version != kFieldDumpVersion)
    throw MfgError("read_field_dump: unsupported version " + std::to_string(version));
  std::uint32_t d = get_u32(is), n = get_u32(is), nt = get_u32(is);
  GridSpec g(static_cast<int>(d), static_cast<int>(n), nt == 0 ? 1 : static_cast<int>(nt), T_hint);
  // nt = 0 dumps hold a single frame; re-wrap it on a one-step grid.
  int frames = static_cast<int>(nt) + 1;
  std::vector<ScalarField> out;
  out.reserve(frames);
  for (int k = 0; k < frames; ++k) {
    std::vector<double> v(g.cells());
    is.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
    if (!is) throw MfgError("read_field_dump: truncated data in " + path);
    out.emplace_back(g, std::move(v));
  }
  if (nt == 0) {
    out.push_back(out.front());
    return FieldTrajectory(g, std::move(out));
  }
  return FieldTrajectory(g, std::move(out));
}

void write_particle_dump(const std::string& path, int d, std::uint32_t N,
                         const std::vector<std::vector<Point>>& snapshots) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw MfgError("write_particle_dump: cannot open " + path);
  write_header(os, "MFGP", static_cast<std::uint32_t>(d), N,
               static_cast<std::uint32_t>(snapshots.size()));
  for (const auto& snap : snapshots) {
    if (snap.size() != N) throw MfgError("write_particle_dump: snapshot size mismatch");
    for (const auto& x : snap)
      os.write(reinterpret_cast<const char*>(x.data()),
               static_cast<std::streamsize>(d * sizeof(double)));
  }
  if (!os) throw MfgError("write_particle_dump: write failed for " + path);
}

}  // namespace mfglab
