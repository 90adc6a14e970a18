#pragma once

#include <cstddef>

namespace se2conv::detail {

// Row-major GEMM: C = op(A)(MxK) * op(B)(KxN) (+ C when accumulate).
// transpose_a / transpose_b mark the operand as stored transposed.
void gemm(const float* a, const float* b, float* c, std::size_t m, std::size_t k, std::size_t n,
          bool transpose_a, bool transpose_b, bool accumulate);
void gemm(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
          std::size_t n, bool transpose_a, bool transpose_b, bool accumulate);

// Caps BLAS worker threads; 1 keeps results bit-identical run to run.
void set_blas_threads(int n);

}  // namespace se2conv::detail
