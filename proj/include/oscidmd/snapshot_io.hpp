#pragma once

// Snapshot file: "OSCIDMD1", u64 n, u64 columns, f64 a, b, tau, eps, then the
// data column-major with interleaved (re, im) f64. All little-endian.

#include <filesystem>
#include <fstream>

#include "oscidmd/binary_io.hpp"
#include "oscidmd/spectral_solver.hpp"

namespace oscidmd {

inline constexpr std::string_view kSnapshotMagic = "OSCIDMD1";

inline void write_snapshots(std::ostream& os, const SnapshotMatrix& x) {
  binio::write_magic(os, kSnapshotMagic);
  binio::write_u64(os, static_cast<std::uint64_t>(x.data.rows()));
  binio::write_u64(os, static_cast<std::uint64_t>(x.data.cols()));
  binio::write_f64(os, x.grid.a);
  binio::write_f64(os, x.grid.b);
  binio::write_f64(os, x.tau);
  binio::write_f64(os, x.eps);
  binio::write_complex_matrix(os, x.data);
}

inline SnapshotMatrix read_snapshots(std::istream& is) {
  binio::expect_magic(is, kSnapshotMagic);
  SnapshotMatrix x;
  const Index n = binio::checked_dim(binio::read_u64(is, "n"), "n");
  const Index cols = binio::checked_dim(binio::read_u64(is, "columns"), "columns");
  x.grid.a = binio::read_f64(is, "a");
  x.grid.b = binio::read_f64(is, "b");
  x.grid.n = n;
  x.tau = binio::read_f64(is, "tau");
  x.eps = binio::read_f64(is, "eps");
  x.data = binio::read_complex_matrix(is, n, cols, "snapshot data");
  return x;
}

inline void write_snapshots(const std::filesystem::path& path, const SnapshotMatrix& x) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw ValidationError("cannot open for writing: " + path.string());
  write_snapshots(os, x);
  if (!os) throw ValidationError("write failed: " + path.string());
}

inline SnapshotMatrix read_snapshots(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ValidationError("cannot open snapshot file: " + path.string());
  return read_snapshots(is);
}

}  // namespace oscidmd
