#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "se2conv/autograd.hpp"
#include "se2conv/tensor.hpp"

namespace se2conv::detail {

// Lowering of 2D cross-correlation to im2col + GEMM, with an arbitrary list
// of support offsets so disk-masked kernels skip their structural zeros.
//
// Input is [B,H,W,Cflat] row-major; weights are [S*Cflat, Ncols]; the output
// is [B*Ho*Wo, Ncols] which reshapes to [B,Ho,Wo,...] for free.
struct ConvPlan {
  int batch = 0, in_h = 0, in_w = 0, ch = 0;
  int out_h = 0, out_w = 0;
  int stride = 1;
  // Input row = out_row * stride + offset.first, likewise for columns.
  // Out-of-range samples read as zero (same-zero padding semantics).
  std::vector<std::pair<int, int>> offsets;

  std::size_t rows() const { return std::size_t(batch) * out_h * out_w; }
  std::size_t cols() const { return offsets.size() * std::size_t(ch); }
};

// Full n x n support in kernel row-major order. SameZero centers the window
// at the output pixel; Valid anchors it top-left and shrinks the output.
ConvPlan make_conv_plan(int batch, int in_h, int in_w, int ch, int n, Padding padding,
                        int stride);

// Same-zero plan over explicit kernel positions (row, col) of an n x n grid,
// in the given order.
ConvPlan make_masked_plan(int batch, int in_h, int in_w, int ch,
                          const std::vector<std::pair<int, int>>& positions, int n);

template <typename T>
void im2col(const T* input, const ConvPlan& plan, T* col);

// Scatter-adds columns back into the input layout; fixed iteration order.
template <typename T>
void col2im_add(const T* col, const ConvPlan& plan, T* input_grad);

// out[rows, ncols] = im2col(input) * weights
template <typename T>
void conv_forward(const T* input, const ConvPlan& plan, const T* weights, std::size_t ncols,
                  T* out);

// wgrad[S*ch, ncols] = im2col(input)^T * upstream
template <typename T>
void conv_grad_weights(const T* input, const ConvPlan& plan, const T* upstream,
                       std::size_t ncols, T* wgrad, bool accumulate);

// input_grad += col2im(upstream * weights^T)
template <typename T>
void conv_grad_input_add(const T* upstream, const ConvPlan& plan, const T* weights,
                         std::size_t ncols, T* input_grad);

}  // namespace se2conv::detail
