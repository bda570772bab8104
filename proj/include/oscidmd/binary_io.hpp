#pragma once

// Little-endian primitives shared by the snapshot and model file formats.

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include "oscidmd/errors.hpp"
#include "oscidmd/linalg.hpp"

namespace oscidmd::binio {

inline void write_u64(std::ostream& os, std::uint64_t v) {
  std::array<char, 8> bytes{};
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
  os.write(bytes.data(), 8);
}

inline void write_f64(std::ostream& os, double v) {
  write_u64(os, std::bit_cast<std::uint64_t>(v));
}

inline void write_u8(std::ostream& os, std::uint8_t v) {
  os.put(static_cast<char>(v));
}

inline void write_magic(std::ostream& os, std::string_view magic) {
  os.write(magic.data(), static_cast<std::streamsize>(magic.size()));
}

/// Column-major, (re, im) interleaved.
inline void write_complex_matrix(std::ostream& os, const ComplexMatrix& m) {
  for (Index c = 0; c < m.cols(); ++c)
    for (Index r = 0; r < m.rows(); ++r) {
      write_f64(os, m(r, c).real());
      write_f64(os, m(r, c).imag());
    }
}

inline void write_real_vector(std::ostream& os, const RealVector& v) {
  for (Index i = 0; i < v.size(); ++i) write_f64(os, v(i));
}

inline void read_exact(std::istream& is, char* dst, std::size_t count, const char* what) {
  is.read(dst, static_cast<std::streamsize>(count));
  if (static_cast<std::size_t>(is.gcount()) != count) throw ValidationError(std::string("truncated file while reading ") + what);
}

inline std::uint64_t read_u64(std::istream& is, const char* what) {
  std::array<char, 8> bytes{};
  read_exact(is, bytes.data(), 8, what);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[i])) << (8 * i);
  return v;
}

inline double read_f64(std::istream& is, const char* what) {
  return std::bit_cast<double>(read_u64(is, what));
}

inline std::uint8_t read_u8(std::istream& is, const char* what) {
  char c = 0;
  read_exact(is, &c, 1, what);
  return static_cast<std::uint8_t>(c);
}

inline void expect_magic(std::istream& is, std::string_view magic) {
  std::string got(magic.size(), '\0');
  read_exact(is, got.data(), magic.size(), "magic");
  if (got != magic) throw ValidationError("bad magic: expected " + std::string(magic));
}

/// Guards against absurd sizes from corrupted headers before allocating.
inline Index checked_dim(std::uint64_t v, const char* what) {
  constexpr std::uint64_t kMax = std::uint64_t{1} << 31;
  if (v > kMax) throw ValidationError(std::string("implausible dimension for ") + what);
  return static_cast<Index>(v);
}

inline ComplexMatrix read_complex_matrix(std::istream& is, Index rows, Index cols, const char* what) {
  ComplexMatrix m(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) {
      const double re = read_f64(is, what);
      const double im = read_f64(is, what);
      m(r, c) = Complex(re, im);
    }
  return m;
}

inline RealVector read_real_vector(std::istream& is, Index size, const char* what) {
  RealVector v(size);
  for (Index i = 0; i < size; ++i) v(i) = read_f64(is, what);
  return v;
}

}  // namespace oscidmd::binio
