#include "detail/conv_kernels.hpp"

#include <cstring>
#include <stdexcept>

#include "detail/blas.hpp"

namespace se2conv::detail {

ConvPlan make_conv_plan(int batch, int in_h, int in_w, int ch, int n, Padding padding,
                        int stride) {
  if (stride < 1) throw std::invalid_argument("stride must be >= 1");
  ConvPlan plan;
  plan.batch = batch;
  plan.in_h = in_h;
  plan.in_w = in_w;
  plan.ch = ch;
  plan.stride = stride;
  int center = (n - 1) / 2;
  if (padding == Padding::SameZero) {
    plan.out_h = (in_h + stride - 1) / stride;
    plan.out_w = (in_w + stride - 1) / stride;
    for (int kr = 0; kr < n; ++kr)
      for (int kc = 0; kc < n; ++kc) plan.offsets.emplace_back(kr - center, kc - center);
  } else {
    if (n > in_h || n > in_w)
      throw std::invalid_argument("valid correlation needs kernel size <= image size");
    plan.out_h = (in_h - n) / stride + 1;
    plan.out_w = (in_w - n) / stride + 1;
    for (int kr = 0; kr < n; ++kr)
      for (int kc = 0; kc < n; ++kc) plan.offsets.emplace_back(kr, kc);
  }
  return plan;
}

ConvPlan make_masked_plan(int batch, int in_h, int in_w, int ch,
                          const std::vector<std::pair<int, int>>& positions, int n) {
  ConvPlan plan;
  plan.batch = batch;
  plan.in_h = in_h;
  plan.in_w = in_w;
  plan.ch = ch;
  plan.stride = 1;
  plan.out_h = in_h;
  plan.out_w = in_w;
  int center = (n - 1) / 2;
  for (auto [kr, kc] : positions) plan.offsets.emplace_back(kr - center, kc - center);
  return plan;
}

template <typename T>
void im2col(const T* input, const ConvPlan& plan, T* col) {
  const int ch = plan.ch;
  const std::size_t s = plan.offsets.size();
  const std::size_t row_len = s * ch;
  const std::size_t im_row_stride = std::size_t(plan.in_w) * ch;
  const std::size_t im_batch_stride = std::size_t(plan.in_h) * im_row_stride;
  std::size_t row = 0;
  for (int b = 0; b < plan.batch; ++b) {
    const T* im = input + b * im_batch_stride;
    for (int oy = 0; oy < plan.out_h; ++oy) {
      for (int ox = 0; ox < plan.out_w; ++ox, ++row) {
        T* dst = col + row * row_len;
        for (std::size_t k = 0; k < s; ++k, dst += ch) {
          int iy = oy * plan.stride + plan.offsets[k].first;
          int ix = ox * plan.stride + plan.offsets[k].second;
          if (iy < 0 || iy >= plan.in_h || ix < 0 || ix >= plan.in_w) {
            std::memset(dst, 0, sizeof(T) * ch);
          } else {
            std::memcpy(dst, im + iy * im_row_stride + std::size_t(ix) * ch, sizeof(T) * ch);
          }
        }
      }
    }
  }
}

template <typename T>
void col2im_add(const T* col, const ConvPlan& plan, T* input_grad) {
  const int ch = plan.ch;
  const std::size_t s = plan.offsets.size();
  const std::size_t row_len = s * ch;
  const std::size_t im_row_stride = std::size_t(plan.in_w) * ch;
  const std::size_t im_batch_stride = std::size_t(plan.in_h) * im_row_stride;
  std::size_t row = 0;
  for (int b = 0; b < plan.batch; ++b) {
    T* im = input_grad + b * im_batch_stride;
    for (int oy = 0; oy < plan.out_h; ++oy) {
      for (int ox = 0; ox < plan.out_w; ++ox, ++row) {
        const T* src = col + row * row_len;
        for (std::size_t k = 0; k < s; ++k, src += ch) {
          int iy = oy * plan.stride + plan.offsets[k].first;
          int ix = ox * plan.stride + plan.offsets[k].second;
          if (iy < 0 || iy >= plan.in_h || ix < 0 || ix >= plan.in_w) continue;
          T* dst = im + iy * im_row_stride + std::size_t(ix) * ch;
          for (int c = 0; c < ch; ++c) dst[c] += src[c];
        }
      }
    }
  }
}

template <typename T>
void conv_forward(const T* input, const ConvPlan& plan, const T* weights, std::size_t ncols,
                  T* out) {
  std::vector<T> col(plan.rows() * plan.cols());
  im2col(input, plan, col.data());
  gemm(col.data(), weights, out, plan.rows(), plan.cols(), ncols, false, false, false);
}

template <typename T>
void conv_grad_weights(const T* input, const ConvPlan& plan, const T* upstream,
                       std::size_t ncols, T* wgrad, bool accumulate) {
  std::vector<T> col(plan.rows() * plan.cols());
  im2col(input, plan, col.data());
  // wgrad = col^T (cols x rows) * upstream (rows x ncols)
  gemm(col.data(), upstream, wgrad, plan.cols(), plan.rows(), ncols, true, false, accumulate);
}

template <typename T>
void conv_grad_input_add(const T* upstream, const ConvPlan& plan, const T* weights,
                         std::size_t ncols, T* input_grad) {
  std::vector<T> col(plan.rows() * plan.cols());
  gemm(upstream, weights, col.data(), plan.rows(), ncols, plan.cols(), false, true, false);
  col2im_add(col.data(), plan, input_grad);
}

template void im2col<float>(const float*, const ConvPlan&, float*);
template void im2col<double>(const double*, const ConvPlan&, double*);
template void col2im_add<float>(const float*, const ConvPlan&, float*);
template void col2im_add<double>(const double*, const ConvPlan&, double*);
template void conv_forward<float>(const float*, const ConvPlan&, const float*, std::size_t,
                                  float*);
template void conv_forward<double>(const double*, const ConvPlan&, const double*, std::size_t,
                                   double*);
template void conv_grad_weights<float>(const float*, const ConvPlan&, const float*, std::size_t,
                                       float*, bool);
template void conv_grad_weights<double>(const double*, const ConvPlan&, const double*,
                                        std::size_t, double*, bool);
template void conv_grad_input_add<float>(const float*, const ConvPlan&, const float*,
                                         std::size_t, float*);
template void conv_grad_input_add<double>(const double*, const ConvPlan&, const double*,
                                          std::size_t, double*);

}  // namespace se2conv::detail
