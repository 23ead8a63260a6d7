#pragma once

// Binary field snapshots.
//
// Byte layout (little-endian throughout):
//   offset  size  field
//   0       5     magic "AWIA1"
//   5       1     kind: 0 = 3D lattice field, 1 = radial shifted field
//   6       1     precision: 8 = complex64 (two float32), 16 = complex128
//   7       1     reserved (0)
//   8       24    dims, 3 x int64 (radial: {n, 1, 1})
//   32      24    spacings in m, 3 x float64 (radial: {dr, 0, 0})
//   56      8     time, s
//   64      8     rho0, m^-3
//   72      8     mu, J
//   80      ...   values, z fastest, interleaved (re, im) pairs
//
// Radial snapshots store the shifted field (deviation from the homogeneous
// background); the background is reconstructed from time, rho0 and mu.
// complex128 snapshots round-trip bit-exact; complex64 is a lossy export.

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "awia/errors.hpp"
#include "awia/field.hpp"
#include "awia/grid.hpp"

namespace awia::io {

static_assert(std::endian::native == std::endian::little,
              "snapshot format is little-endian");

enum class SnapshotKind : std::uint8_t { LATTICE = 0, RADIAL = 1 };
enum class Precision : std::uint8_t { C64 = 8, C128 = 16 };

namespace detail {

struct RawHeader {
  std::int64_t dims[3];
  double spac[3];
  double time, rho0, mu;
};

inline void write_blob(const std::string& path, SnapshotKind kind,
                       Precision prec, const RawHeader& h,
                       const std::vector<cplx>& values) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write snapshot: " + tmp);
    out.write("AWIA1", 5);
    std::uint8_t meta[3] = {static_cast<std::uint8_t>(kind),
                            static_cast<std::uint8_t>(prec), 0};
    out.write(reinterpret_cast<const char*>(meta), 3);
    out.write(reinterpret_cast<const char*>(&h), sizeof(h));
    if (prec == Precision::C128) {
      out.write(reinterpret_cast<const char*>(values.data()),
                static_cast<std::streamsize>(values.size() * sizeof(cplx)));
    } else {
      std::vector<float> f(values.size() * 2);
      for (std::size_t i = 0; i < values.size(); ++i) {
        f[2 * i] = static_cast<float>(values[i].real());
        f[2 * i + 1] = static_cast<float>(values[i].imag());
      }
      out.write(reinterpret_cast<const char*>(f.data()),
                static_cast<std::streamsize>(f.size() * sizeof(float)));
    }
    if (!out) throw IoError("write failed: " + tmp);
  }
  // atomic publish: readers see either nothing or the full file
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw IoError("cannot rename " + tmp + " to " + path);
}

inline void read_blob(const std::string& path, SnapshotKind expect,
                      RawHeader& h, std::vector<cplx>& values) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open snapshot: " + path);
  char magic[5];
  std::uint8_t meta[3];
  in.read(magic, 5);
  in.read(reinterpret_cast<char*>(meta), 3);
  if (!in || std::memcmp(magic, "AWIA1", 5) != 0)
    throw IoError("not a field snapshot (bad magic): " + path);
  if (meta[0] != static_cast<std::uint8_t>(expect))
    throw IoError("snapshot kind mismatch in " + path);
  if (meta[1] != 8 && meta[1] != 16)
    throw IoError("snapshot has unknown precision tag in " + path);
  in.read(reinterpret_cast<char*>(&h), sizeof(h));
  if (!in) throw IoError("truncated snapshot header: " + path);
  std::size_t n = 1;
  for (int a = 0; a < 3; ++a) {
    if (h.dims[a] < 1 || h.dims[a] > (1 << 24))
      throw IoError("snapshot has implausible dimensions: " + path);
    n *= static_cast<std::size_t>(h.dims[a]);
  }
  values.resize(n);
  if (meta[1] == 16) {
    in.read(reinterpret_cast<char*>(values.data()),
            static_cast<std::streamsize>(n * sizeof(cplx)));
  } else {
    std::vector<float> f(n * 2);
    in.read(reinterpret_cast<char*>(f.data()),
            static_cast<std::streamsize>(f.size() * sizeof(float)));
    for (std::size_t i = 0; i < n; ++i)
      values[i] = cplx(f[2 * i], f[2 * i + 1]);
  }
  if (!in) throw IoError("truncated snapshot values: " + path);
}

}  // namespace detail

inline void write_snapshot(const std::string& path, const LatticeField& f,
                           Precision prec = Precision::C128) {
  detail::RawHeader h{};
  for (int a = 0; a < 3; ++a) {
    h.dims[a] = f.grid.n[a];
    h.spac[a] = f.grid.d[a];
  }
  h.time = f.time;
  h.rho0 = f.rho0;
  h.mu = f.mu;
  detail::write_blob(path, SnapshotKind::LATTICE, prec, h, f.psi);
}

inline void write_snapshot(const std::string& path, const RadialField& f,
                           Precision prec = Precision::C128) {
  detail::RawHeader h{};
  h.dims[0] = f.grid.n;
  h.dims[1] = h.dims[2] = 1;
  h.spac[0] = f.grid.dr;
  h.time = f.time;
  h.rho0 = f.rho0;
  h.mu = f.mu;
  detail::write_blob(path, SnapshotKind::RADIAL, prec, h, f.ut);
}

inline SnapshotKind snapshot_kind(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open snapshot: " + path);
  char magic[5];
  std::uint8_t kind;
  in.read(magic, 5);
  in.read(reinterpret_cast<char*>(&kind), 1);
  if (!in || std::memcmp(magic, "AWIA1", 5) != 0)
    throw IoError("not a field snapshot (bad magic): " + path);
  if (kind > 1) throw IoError("snapshot has unknown kind tag in " + path);
  return static_cast<SnapshotKind>(kind);
}

// header-only peek, works for either kind
inline double snapshot_time(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open snapshot: " + path);
  char head[8];
  in.read(head, 8);
  if (!in || std::memcmp(head, "AWIA1", 5) != 0)
    throw IoError("not a field snapshot (bad magic): " + path);
  detail::RawHeader h;
  in.read(reinterpret_cast<char*>(&h), sizeof(h));
  if (!in) throw IoError("truncated snapshot header: " + path);
  return h.time;
}

inline LatticeField read_lattice_snapshot(const std::string& path) {
  detail::RawHeader h;
  LatticeField f;
  detail::read_blob(path, SnapshotKind::LATTICE, h, f.psi);
  for (int a = 0; a < 3; ++a) {
    f.grid.n[a] = static_cast<int>(h.dims[a]);
    f.grid.d[a] = h.spac[a];
  }
  f.time = h.time;
  f.rho0 = h.rho0;
  f.mu = h.mu;
  return f;
}

inline RadialField read_radial_snapshot(const std::string& path) {
  detail::RawHeader h;
  RadialField f;
  detail::read_blob(path, SnapshotKind::RADIAL, h, f.ut);
  f.grid.n = static_cast<int>(h.dims[0]);
  f.grid.dr = h.spac[0];
  f.time = h.time;
  f.rho0 = h.rho0;
  f.mu = h.mu;
  return f;
}

}  // namespace awia::io
