#pragma once

#include <iosfwd>
#include <string>

#include "se2conv/tensor.hpp"

namespace se2conv {

// "SE2T" container: magic, u32-LE rank, u32-LE dims, u8 precision flag
// (4 = float, 8 = double), raw little-endian scalars row-major.

template <typename T>
void write_se2t(std::ostream& out, const Tensor<T>& t);

// Precision flag of the tensor at the stream position, without consuming it.
int peek_se2t_precision(std::istream& in);

// Reads a tensor whose stored precision matches T exactly.
template <typename T>
Tensor<T> read_se2t(std::istream& in);

// Reads either precision and converts to T.
template <typename T>
Tensor<T> read_se2t_any(std::istream& in);

template <typename T>
void write_se2t_file(const std::string& path, const Tensor<T>& t);

template <typename T>
Tensor<T> read_se2t_file(const std::string& path);

template <typename T>
Tensor<T> read_se2t_file_any(const std::string& path);

// Binary PGM (P5) / PPM (P6) import, maxval <= 255; values scaled to [0,1].
// Result is [H,W,1] for PGM, [H,W,3] for PPM.
Tensor<float> read_pnm_file(const std::string& path);

// Binary PPM export; values are clamped to [0,1] and scaled to 8 bit.
// Accepts [H,W,1] or [H,W,3].
void write_ppm_file(const std::string& path, const Tensor<float>& img);

// Writes via a temporary file in the same directory, then renames, so a
// failed write never leaves a partial file at `path`.
void atomic_write_file(const std::string& path, const std::string& bytes);

std::string read_file_bytes(const std::string& path);

}  // namespace se2conv
