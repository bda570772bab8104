#pragma once

// Model file: "OSCIMDL1", scheme byte (0 classical, 1 piDMD, 2 CN, 3 SI),
// u64 n, u64 r, f64 tau, then the payload of the model type in declaration
// order. Complex arrays are column-major interleaved (re, im) f64; real
// arrays are plain f64. All little-endian.
//
//   classical: modes (n x r), eigenvalues (r), amplitudes (r), frequencies (r)
//   piDMD:     L (n x n), r == n
//   CN / SI:   basis (n x r), eigenvalues (r, real), factors (r)

#include <filesystem>
#include <fstream>
#include <variant>

#include "oscidmd/binary_io.hpp"
#include "oscidmd/dmd.hpp"

namespace oscidmd {

inline constexpr std::string_view kModelMagic = "OSCIMDL1";

using AnyModel = std::variant<ClassicalDmdModel, UnitaryModel, ReducedHermitianModel>;

inline Method model_method(const AnyModel& m) {
  return std::visit(
      [](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ClassicalDmdModel>) return Method::kClassical;
        else if constexpr (std::is_same_v<T, UnitaryModel>) return Method::kPiDmd;
        else return v.scheme;
      },
      m);
}

inline void write_model(std::ostream& os, const AnyModel& model) {
  binio::write_magic(os, kModelMagic);
  binio::write_u8(os, static_cast<std::uint8_t>(model_method(model)));
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ClassicalDmdModel>) {
          binio::write_u64(os, static_cast<std::uint64_t>(v.modes.rows()));
          binio::write_u64(os, static_cast<std::uint64_t>(v.modes.cols()));
          binio::write_f64(os, v.tau);
          binio::write_complex_matrix(os, v.modes);
          binio::write_complex_matrix(os, v.eigenvalues);
          binio::write_complex_matrix(os, v.amplitudes);
          binio::write_complex_matrix(os, v.frequencies);
        } else if constexpr (std::is_same_v<T, UnitaryModel>) {
          binio::write_u64(os, static_cast<std::uint64_t>(v.L.rows()));
          binio::write_u64(os, static_cast<std::uint64_t>(v.L.cols()));
          binio::write_f64(os, v.tau);
          binio::write_complex_matrix(os, v.L);
        } else {
          binio::write_u64(os, static_cast<std::uint64_t>(v.basis.rows()));
          binio::write_u64(os, static_cast<std::uint64_t>(v.basis.cols()));
          binio::write_f64(os, v.tau);
          binio::write_complex_matrix(os, v.basis);
          binio::write_real_vector(os, v.eigenvalues);
          binio::write_complex_matrix(os, v.factors);
        }
      },
      model);
}

inline AnyModel read_model(std::istream& is) {
  binio::expect_magic(is, kModelMagic);
  const std::uint8_t tag = binio::read_u8(is, "scheme");
  if (tag > 3) throw ValidationError("model file: unknown scheme tag " + std::to_string(tag));
  const Index n = binio::checked_dim(binio::read_u64(is, "n"), "n");
  const Index r = binio::checked_dim(binio::read_u64(is, "r"), "r");
  const double tau = binio::read_f64(is, "tau");
  switch (static_cast<Method>(tag)) {
    case Method::kClassical: {
      ClassicalDmdModel m;
      m.tau = tau;
      m.modes = binio::read_complex_matrix(is, n, r, "modes");
      m.eigenvalues = binio::read_complex_matrix(is, r, 1, "eigenvalues");
      m.amplitudes = binio::read_complex_matrix(is, r, 1, "amplitudes");
      m.frequencies = binio::read_complex_matrix(is, r, 1, "frequencies");
      return m;
    }
    case Method::kPiDmd: {
      if (r != n) throw ValidationError("model file: piDMD operator must be square");
      UnitaryModel m;
      m.tau = tau;
      m.L = binio::read_complex_matrix(is, n, n, "operator");
      return m;
    }
    default: {
      ReducedHermitianModel m;
      m.scheme = static_cast<Method>(tag);
      m.tau = tau;
      m.basis = binio::read_complex_matrix(is, n, r, "basis");
      m.eigenvalues = binio::read_real_vector(is, r, "eigenvalues");
      m.factors = binio::read_complex_matrix(is, r, 1, "factors");
      return m;
    }
  }
}

inline void write_model(const std::filesystem::path& path, const AnyModel& model) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw ValidationError("cannot open for writing: " + path.string());
  write_model(os, model);
  if (!os) throw ValidationError("write failed: " + path.string());
}

inline AnyModel read_model(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ValidationError("cannot open model file: " + path.string());
  return read_model(is);
}

}  // namespace oscidmd
