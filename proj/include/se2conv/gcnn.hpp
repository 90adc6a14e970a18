#pragma once

#include <memory>

#include "se2conv/autograd.hpp"
#include "se2conv/rotation_op.hpp"

namespace se2conv {

// Orientation-resolving layers. Planar images are [B,H,W,C]; orientation
// stacks are [B,H,W,N,C] with N the orientation count of the rotation
// operator. Spatial padding is same-zero, stride 1.
//
// Both correlations lower to a single im2col + GEMM: the rotation operator is
// folded into a dense weight matrix whose column order matches the
// [..., N, Cout] output layout, so one product yields every orientation.

// Planar input [B,H,W,Cin] with kernels [Cout,Cin,M] -> [B,H,W,N,Cout].
// Output orientation i correlates the input with the kernel rotated by
// theta_i = 2*pi*i/N.
template <typename T>
Var<T> lift_correlate(Var<T> input, Var<T> kernels,
                      std::shared_ptr<const RotationOperator> op);

// Stack input [B,H,W,N,Cin] with kernels [Cout,Cin,N,M] -> [B,H,W,N,Cout].
// Output orientation i reads input orientation m through kernel slice
// (m - i) mod N rotated by theta_i, which makes the layer commute with the
// shift-twist action.
template <typename T>
Var<T> group_correlate(Var<T> input, Var<T> kernels,
                       std::shared_ptr<const RotationOperator> op);

// Max over the orientation axis: [B,H,W,N,C] -> [B,H,W,C]; gradient routes to
// the argmax, lowest orientation index on ties.
template <typename T>
Var<T> project_max_orientations(Var<T> input);

// Mean over the orientation axis, same shapes; ablation alternative to max.
template <typename T>
Var<T> project_mean_orientations(Var<T> input);

// Spatial max pool applied independently per (orientation, channel) slice of
// [B,H,W,N,C]; the orientation axis is untouched.
template <typename T>
Var<T> se2_max_pool(Var<T> input, int window);

// Dense rotated copies of disk-masked kernels: base [..., M] ->
// [n, n, N, ...], zero off the mask. Differentiable; the backward pass applies
// the transposed operator. Mainly for inspection and oracle tests - the
// correlation layers fold the operator in without materializing this stack.
template <typename T>
Var<T> rotate_kernel_stack(Var<T> base, std::shared_ptr<const RotationOperator> op);

}  // namespace se2conv
