#include "se2conv/se2.hpp"

#include <cmath>

namespace se2conv {

double normalize_angle(double theta) {
  double r = std::fmod(theta, kTwoPi);
  if (r < 0) r += kTwoPi;
  if (r >= kTwoPi) r = 0;
  return r;
}

std::array<double, 4> rotation_matrix(double theta) {
  double c = std::cos(theta), s = std::sin(theta);
  return {c, -s, s, c};
}

GroupElement group_product(const GroupElement& a, const GroupElement& b) {
  auto r = rotation_matrix(a.theta);
  GroupElement out;
  out.x = r[0] * b.x + r[1] * b.y + a.x;
  out.y = r[2] * b.x + r[3] * b.y + a.y;
  out.theta = normalize_angle(a.theta + b.theta);
  return out;
}

GroupElement group_inverse(const GroupElement& a) {
  auto r = rotation_matrix(-a.theta);
  GroupElement out;
  out.x = -(r[0] * a.x + r[1] * a.y);
  out.y = -(r[2] * a.x + r[3] * a.y);
  out.theta = normalize_angle(-a.theta);
  return out;
}

std::array<double, 2> group_action_point(const GroupElement& g, double px, double py) {
  auto r = rotation_matrix(g.theta);
  return {r[0] * px + r[1] * py + g.x, r[2] * px + r[3] * py + g.y};
}

double OrientationSampling::theta(int i) const { return kTwoPi * i / n; }

int OrientationSampling::wrap(int i) const {
  int m = i % n;
  return m < 0 ? m + n : m;
}

int bilinear_taps(double row, double col, int h, int w, Tap out[4]) {
  double rr = std::round(row), rc = std::round(col);
  if (std::abs(row - rr) < kSnapTol) row = rr;
  if (std::abs(col - rc) < kSnapTol) col = rc;
  double fr = std::floor(row), fc = std::floor(col);
  int r0 = static_cast<int>(fr), c0 = static_cast<int>(fc);
  double ar = row - fr, ac = col - fc;
  const double wts[4] = {(1 - ar) * (1 - ac), (1 - ar) * ac, ar * (1 - ac), ar * ac};
  const int dr[4] = {0, 0, 1, 1};
  const int dc[4] = {0, 1, 0, 1};
  int n = 0;
  for (int i = 0; i < 4; ++i) {
    if (wts[i] < kWeightTol) continue;
    int r = r0 + dr[i], c = c0 + dc[i];
    if (r < 0 || r >= h || c < 0 || c >= w) continue;
    out[n++] = {r, c, wts[i]};
  }
  return n;
}

template <typename T>
Tensor<T> apply_roto_translation(const Tensor<T>& image, const GroupElement& g) {
  if (image.rank() != 3)
    throw std::invalid_argument("apply_roto_translation: image must be [H,W,C]");
  int h = static_cast<int>(image.dim(0));
  int w = static_cast<int>(image.dim(1));
  std::size_t ch = image.dim(2);
  auto rinv = rotation_matrix(-g.theta);
  Tensor<T> out(image.shape());
  Tap taps[4];
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      double xo, yo;
      grid_to_math(r, c, h, w, xo, yo);
      double xs = rinv[0] * (xo - g.x) + rinv[1] * (yo - g.y);
      double ys = rinv[2] * (xo - g.x) + rinv[3] * (yo - g.y);
      double sr, sc;
      math_to_grid(xs, ys, h, w, sr, sc);
      int nt = bilinear_taps(sr, sc, h, w, taps);
      for (std::size_t k = 0; k < ch; ++k) {
        double acc = 0;
        for (int t = 0; t < nt; ++t)
          acc += taps[t].weight *
                 static_cast<double>(image[(std::size_t(taps[t].row) * w + taps[t].col) * ch + k]);
        out[(std::size_t(r) * w + c) * ch + k] = static_cast<T>(acc);
      }
    }
  return out;
}

template <typename T>
Tensor<T> apply_shift_twist(const Tensor<T>& stack, const DiscreteGroupElement& g) {
  if (stack.rank() != 4)
    throw std::invalid_argument("apply_shift_twist: stack must be [H,W,N,C]");
  int n = static_cast<int>(stack.dim(2));
  if (g.n != n)
    throw std::invalid_argument("apply_shift_twist: element sampling does not match the stack");
  std::size_t hs = stack.dim(0), ws = stack.dim(1), cs = stack.dim(3);
  OrientationSampling samp{n};
  GroupElement planar{g.x, g.y, samp.theta(samp.wrap(g.k))};

  Tensor<T> out(stack.shape());
  Tensor<T> slice({hs, ws, cs});
  for (int j = 0; j < n; ++j) {
    int src = samp.wrap(j - g.k);
    for (std::size_t r = 0; r < hs; ++r)
      for (std::size_t c = 0; c < ws; ++c)
        for (std::size_t k = 0; k < cs; ++k)
          slice[(r * ws + c) * cs + k] = stack[((r * ws + c) * n + src) * cs + k];
    Tensor<T> moved = apply_roto_translation(slice, planar);
    for (std::size_t r = 0; r < hs; ++r)
      for (std::size_t c = 0; c < ws; ++c)
        for (std::size_t k = 0; k < cs; ++k)
          out[((r * ws + c) * n + j) * cs + k] = moved[(r * ws + c) * cs + k];
  }
  return out;
}

template <typename T>
Tensor<T> apply_shift_twist(const Tensor<T>& stack, const GroupElement& g) {
  if (stack.rank() != 4)
    throw std::invalid_argument("apply_shift_twist: stack must be [H,W,N,C]");
  int n = static_cast<int>(stack.dim(2));
  double step = kTwoPi / n;
  double t = normalize_angle(g.theta);
  int k = static_cast<int>(std::lround(t / step));
  double nearest = normalize_angle(step * k);
  if (std::abs(t - nearest) > kSnapTol && std::abs(t - nearest - kTwoPi) > kSnapTol)
    throw std::invalid_argument("apply_shift_twist: angle " + std::to_string(g.theta) +
                                " is not one of the " + std::to_string(n) +
                                " sampled orientations");
  return apply_shift_twist(stack, DiscreteGroupElement{g.x, g.y, k % n, n});
}

template Tensor<float> apply_roto_translation<float>(const Tensor<float>&, const GroupElement&);
template Tensor<double> apply_roto_translation<double>(const Tensor<double>&,
                                                       const GroupElement&);
template Tensor<float> apply_shift_twist<float>(const Tensor<float>&,
                                                const DiscreteGroupElement&);
template Tensor<double> apply_shift_twist<double>(const Tensor<double>&,
                                                  const DiscreteGroupElement&);
template Tensor<float> apply_shift_twist<float>(const Tensor<float>&, const GroupElement&);
template Tensor<double> apply_shift_twist<double>(const Tensor<double>&, const GroupElement&);

}  // namespace se2conv
