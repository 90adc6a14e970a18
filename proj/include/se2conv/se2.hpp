#pragma once

#include <array>
#include <cstddef>

#include "se2conv/tensor.hpp"

namespace se2conv {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Angle reduced to [0, 2*pi).
double normalize_angle(double theta);

// Roto-translation (x, y, theta): rotate by theta about the origin, then
// translate. x is right, y is up; theta is counterclockwise and kept in
// [0, 2*pi).
struct GroupElement {
  double x = 0, y = 0, theta = 0;
};

// Element with the rotation constrained to one of n equal steps.
struct DiscreteGroupElement {
  double x = 0, y = 0;
  int k = 0;  // rotation index, theta = 2*pi*k/n
  int n = 1;
};

// Row-major 2x2 matrix {a, b, c, d} = [[a, b], [c, d]].
std::array<double, 4> rotation_matrix(double theta);

GroupElement group_product(const GroupElement& a, const GroupElement& b);
GroupElement group_inverse(const GroupElement& a);

// g acting on a point: R_theta * p + (x, y).
std::array<double, 2> group_action_point(const GroupElement& g, double px, double py);

// n equally spaced orientations theta_i = 2*pi*i/n.
struct OrientationSampling {
  int n = 1;
  double theta(int i) const;
  // Index arithmetic modulo n, valid for any ints.
  int wrap(int i) const;
};

// --- grid <-> math frame -------------------------------------------------------
//
// Images are stored row-major with row 0 at the top, so the storage row axis
// points down while the math y axis points up. Everything that samples a grid
// under a rotation goes through these two helpers so the convention lives in
// exactly one place. The frame origin sits at the grid center
// ((h-1)/2, (w-1)/2), which is also the center of every rotation.

inline void grid_to_math(double row, double col, int h, int w, double& x, double& y) {
  x = col - (w - 1) * 0.5;
  y = (h - 1) * 0.5 - row;
}

inline void math_to_grid(double x, double y, int h, int w, double& row, double& col) {
  col = x + (w - 1) * 0.5;
  row = (h - 1) * 0.5 - y;
}

// One source pixel of a bilinear read.
struct Tap {
  int row = 0, col = 0;
  double weight = 0;
};

// Bilinear taps for a continuous storage position. Coordinates within
// `kSnapTol` of an integer collapse exactly, so quarter-turn rotations become
// permutations. Taps outside the grid or with negligible weight are dropped;
// the caller treats missing taps as reading zero. Returns the tap count (0-4).
inline constexpr double kSnapTol = 1e-9;
inline constexpr double kWeightTol = 1e-12;
int bilinear_taps(double row, double col, int h, int w, Tap out[4]);

// --- image actions --------------------------------------------------------------

// Roto-translation of a planar image [H,W,C]: out(x') = f(R^-1 (x' - t)),
// sampled bilinearly about the grid center, zero outside.
template <typename T>
Tensor<T> apply_roto_translation(const Tensor<T>& image, const GroupElement& g);

// Shift-twist action on an orientation stack [H,W,N,C] for a discrete element
// (x, y, k): output orientation j is the roto-translated input orientation
// (j - k) mod N.
template <typename T>
Tensor<T> apply_shift_twist(const Tensor<T>& stack, const DiscreteGroupElement& g);

// Same action for a continuous element whose angle must sit on the stack's
// orientation grid (within kSnapTol); other angles are rejected, since the
// twist is an exact cyclic shift with no interpolation across orientations.
template <typename T>
Tensor<T> apply_shift_twist(const Tensor<T>& stack, const GroupElement& g);

}  // namespace se2conv
