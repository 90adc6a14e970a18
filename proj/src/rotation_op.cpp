#include "se2conv/rotation_op.hpp"

#include <cmath>
#include <stdexcept>

#include "se2conv/se2.hpp"

namespace se2conv {

DiskMask build_disk_mask(int n) {
  if (n < 1 || n % 2 == 0)
    throw std::invalid_argument("disk mask: kernel side must be odd and positive, got " +
                                std::to_string(n));
  DiskMask m;
  m.n = n;
  m.index.assign(std::size_t(n) * n, -1);
  // ||pos - center||_2 <= n/2, decided exactly: with d* twice the centered
  // offset, the test is d_r^2 + d_c^2 <= n^2 in integers.
  for (int r = 0; r < n; ++r)
    for (int col = 0; col < n; ++col) {
      int dr = 2 * r - (n - 1), dc = 2 * col - (n - 1);
      if (dr * dr + dc * dc <= n * n) {
        m.index[std::size_t(r) * n + col] = static_cast<int>(m.positions.size());
        m.positions.emplace_back(r, col);
      }
    }
  return m;
}

RotationOperator build_rotation_operator(int kernel_n, int n_orient) {
  if (n_orient < 1) throw std::invalid_argument("rotation operator: n_orient must be >= 1");
  RotationOperator op;
  op.n_orient = n_orient;
  op.mask = build_disk_mask(kernel_n);
  const int n = kernel_n;
  const int m = static_cast<int>(op.mask.size());
  OrientationSampling samp{n_orient};
  Tap taps[4];
  for (int i = 0; i < n_orient; ++i) {
    auto rinv = rotation_matrix(-samp.theta(i));
    for (int s = 0; s < m; ++s) {
      auto [tr, tc] = op.mask.positions[std::size_t(s)];
      double x, y;
      grid_to_math(tr, tc, n, n, x, y);
      double xs = rinv[0] * x + rinv[1] * y;
      double ys = rinv[2] * x + rinv[3] * y;
      double sr, sc;
      math_to_grid(xs, ys, n, n, sr, sc);
      int nt = bilinear_taps(sr, sc, n, n, taps);
      for (int t = 0; t < nt; ++t) {
        int slot = op.mask.slot(taps[t].row, taps[t].col);
        if (slot < 0) continue;  // off-mask coefficients are zero
        op.rows.push_back(i * m + s);
        op.cols.push_back(slot);
        op.vals.push_back(taps[t].weight);
      }
    }
  }
  return op;
}

template <typename T>
void RotationOperator::apply(const T* base, T* out) const {
  std::size_t nr = nrows();
  for (std::size_t r = 0; r < nr; ++r) out[r] = T(0);
  for (std::size_t k = 0; k < vals.size(); ++k)
    out[rows[k]] += static_cast<T>(vals[k]) * base[cols[k]];
}

template <typename T>
void RotationOperator::apply_transpose_add(const T* upstream, T* acc) const {
  for (std::size_t k = 0; k < vals.size(); ++k)
    acc[cols[k]] += static_cast<T>(vals[k]) * upstream[rows[k]];
}

template void RotationOperator::apply<float>(const float*, float*) const;
template void RotationOperator::apply<double>(const double*, double*) const;
template void RotationOperator::apply_transpose_add<float>(const float*, float*) const;
template void RotationOperator::apply_transpose_add<double>(const double*, double*) const;

Tensor<double> RotationOperator::to_dense() const {
  Tensor<double> d({nrows(), ncols()});
  for (std::size_t k = 0; k < vals.size(); ++k)
    d[std::size_t(rows[k]) * ncols() + cols[k]] += vals[k];
  return d;
}

}  // namespace se2conv
