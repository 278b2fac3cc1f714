#pragma once

#include "vsp/types.hpp"

#include <filesystem>
#include <functional>
#include <string>

namespace vsp::io {

/// Self-describing binary container for dense matrices and vectors:
/// magic "VSPM", u16 version, u16 dtype (1 = c128, 2 = f64), u64 rows,
/// u64 cols (little endian), then the row-major payload.
void write_vspm(const std::filesystem::path& path, const ComplexMatrix& mat);
void write_vspm_real(const std::filesystem::path& path, const RealMatrix& mat);

/// Reads either dtype; f64 payloads are promoted to complex.
ComplexMatrix read_vspm(const std::filesystem::path& path);

/// Plaintext interop: comma-separated cells, one matrix row per line.
/// Cells are real ("1.5") or complex ("1.5+0.25i", "2-3i", "1i").
ComplexMatrix read_matrix_csv(const std::filesystem::path& path);
void write_matrix_csv(const std::filesystem::path& path, const ComplexMatrix& mat);

/// Reads a matrix by extension: .csv goes through the plaintext path,
/// anything else through the container.
ComplexMatrix read_matrix_auto(const std::filesystem::path& path);
void write_matrix_auto(const std::filesystem::path& path, const ComplexMatrix& mat);

/// Plain PGM (P2 / P5, 8- or 16-bit) grayscale image with values scaled
/// to [0, 1].
RealMatrix read_pgm(const std::filesystem::path& path);

/// Runs `writer` on a temporary file in the target directory, then renames
/// it over `path`, so interrupted runs never leave truncated output.
void atomic_write(const std::filesystem::path& path,
                  const std::function<void(std::ostream&)>& writer);

/// Shortest decimal form that round-trips a double exactly.
std::string format_double(double value);

}  // namespace vsp::io
