#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "se2conv/tensor.hpp"

namespace se2conv {

// Positions of an n x n kernel grid whose Euclidean distance from the center
// is at most n/2, in row-major order. This is the support on which kernel
// coefficients live; everything outside it is structurally zero.
struct DiskMask {
  int n = 0;
  std::vector<std::pair<int, int>> positions;  // (row, col)
  std::vector<int> index;                      // n*n grid -> slot, -1 off the mask

  std::size_t size() const { return positions.size(); }
  int slot(int row, int col) const { return index[std::size_t(row) * n + col]; }
};

DiskMask build_disk_mask(int n);  // n must be odd and >= 1

// Sparse linear map taking the coefficient vector of a disk-masked kernel to
// the coefficients of its rotated copies at n_orient equally spaced angles.
// Stored as COO triplets sorted by (row, col); row = orientation * M + slot
// with M = mask.size(). Rotation i samples the base kernel at the inverse
// rotation of each target position, bilinearly, about the grid center; taps
// that fall off the mask read zero. Each row therefore has at most 4 entries,
// block 0 is the identity, and quarter-turn blocks are exact permutations.
struct RotationOperator {
  int n_orient = 1;
  DiskMask mask;
  std::vector<int> rows, cols;
  std::vector<double> vals;

  std::size_t nrows() const { return mask.size() * std::size_t(n_orient); }
  std::size_t ncols() const { return mask.size(); }
  std::size_t nnz() const { return vals.size(); }

  // out[N*M] = op * base[M]
  template <typename T>
  void apply(const T* base, T* out) const;
  // acc[M] += op^T * upstream[N*M]
  template <typename T>
  void apply_transpose_add(const T* upstream, T* acc) const;

  Tensor<double> to_dense() const;
};

RotationOperator build_rotation_operator(int kernel_n, int n_orient);

}  // namespace se2conv
