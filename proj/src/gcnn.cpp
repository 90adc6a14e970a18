#include "se2conv/gcnn.hpp"

#include <stdexcept>
#include <type_traits>

#include "detail/conv_kernels.hpp"

namespace se2conv {

namespace {

// Folds the rotation operator into kernel coefficients:
//   Wmat[((s*Nin + m)*Cin + c), (i*Cout + j)] =
//       sum_b op[(i*M + s), b] * K[j, c, (m - i) mod Nown, b]
// with Nown = 1 for lifting (index pinned to 0). `adjoint` runs the same loop
// with the roles of Wmat and K swapped to back-propagate into coefficients.
template <typename T, bool adjoint>
void fold_operator(const RotationOperator& op, int nin, int cin, int cout,
                   std::conditional_t<adjoint, const T*, T*> wmat,
                   std::conditional_t<adjoint, T*, const T*> kern) {
  const int m = static_cast<int>(op.mask.size());
  const int n = op.n_orient;
  const int nown = nin;  // 1 for lifting, N for group correlation
  const std::size_t wcols = std::size_t(n) * cout;
  for (std::size_t t = 0; t < op.vals.size(); ++t) {
    const int i = op.rows[t] / m, s = op.rows[t] % m;
    const int b = op.cols[t];
    const T v = static_cast<T>(op.vals[t]);
    for (int mi = 0; mi < nin; ++mi) {
      const int ko = nown == 1 ? 0 : (mi - i + n) % n;
      for (int c = 0; c < cin; ++c) {
        auto* wrow = wmat + (std::size_t(s) * nin + mi) * cin * wcols + std::size_t(c) * wcols +
                     std::size_t(i) * cout;
        for (int j = 0; j < cout; ++j) {
          auto* kv = kern + ((std::size_t(j) * cin + c) * nown + ko) * m + b;
          if constexpr (adjoint)
            *kv += v * wrow[j];
          else
            wrow[j] += v * *kv;
        }
      }
    }
  }
}

template <typename T>
Var<T> se2_correlate(Var<T> input, Var<T> kernels, std::shared_ptr<const RotationOperator> op,
                     bool lifting, const char* name) {
  const Tensor<T>& x = input.value();
  const Tensor<T>& k = kernels.value();
  if (!op) throw std::invalid_argument(std::string(name) + ": null rotation operator");
  const int n = op->n_orient;
  const std::size_t m = op->mask.size();
  std::size_t cin, nin;
  if (lifting) {
    if (x.rank() != 4) throw std::invalid_argument(std::string(name) + ": input must be [B,H,W,C]");
    if (k.rank() != 3)
      throw std::invalid_argument(std::string(name) + ": kernels must be [Cout,Cin,M]");
    nin = 1;
    cin = x.dim(3);
  } else {
    if (x.rank() != 5)
      throw std::invalid_argument(std::string(name) + ": input must be [B,H,W,N,C]");
    if (k.rank() != 4)
      throw std::invalid_argument(std::string(name) + ": kernels must be [Cout,Cin,N,M]");
    nin = x.dim(3);
    cin = x.dim(4);
    if (nin != std::size_t(n))
      throw std::invalid_argument(std::string(name) + ": input has " + std::to_string(nin) +
                                  " orientations, operator has " + std::to_string(n));
    if (k.dim(2) != std::size_t(n))
      throw std::invalid_argument(std::string(name) + ": kernels have " +
                                  std::to_string(k.dim(2)) + " orientations, operator has " +
                                  std::to_string(n));
  }
  if (k.dim(1) != cin)
    throw std::invalid_argument(std::string(name) + ": channel mismatch, input " +
                                shape_str(x.shape()) + " kernels " + shape_str(k.shape()));
  if (k.dim(k.rank() - 1) != m)
    throw std::invalid_argument(std::string(name) + ": kernels carry " +
                                std::to_string(k.dim(k.rank() - 1)) +
                                " coefficients, mask has " + std::to_string(m));
  const std::size_t b = x.dim(0), h = x.dim(1), w = x.dim(2);
  const std::size_t cout = k.dim(0);
  const std::size_t wcols = std::size_t(n) * cout;

  auto plan = std::make_shared<detail::ConvPlan>(detail::make_masked_plan(
      static_cast<int>(b), static_cast<int>(h), static_cast<int>(w),
      static_cast<int>(nin * cin), op->mask.positions, op->mask.n));
  auto wmat = std::make_shared<Tensor<T>>(std::vector<std::size_t>{m * nin * cin, wcols});
  fold_operator<T, false>(*op, static_cast<int>(nin), static_cast<int>(cin),
                          static_cast<int>(cout), wmat->data(), k.data());

  Tensor<T> out({b, h, w, std::size_t(n), cout});
  detail::conv_forward(x.data(), *plan, wmat->data(), wcols, out.data());

  int id = input.tape->push_op(
      std::move(out), {input.id, kernels.id, -1}, name,
      [plan, wmat, op, nin, cin, cout, wcols](Tape<T>& t, int self) {
        const Tensor<T>& g = t.node(self).grad;
        auto [px, pk, _] = t.node(self).parents;
        const Tensor<T>& xv = t.node(px).value;
        Tensor<T> dwmat(wmat->shape());
        detail::conv_grad_weights(xv.data(), *plan, g.data(), wcols, dwmat.data(), false);
        fold_operator<T, true>(*op, static_cast<int>(nin), static_cast<int>(cin),
                               static_cast<int>(cout), dwmat.data(), t.grad(pk).data());
        detail::conv_grad_input_add(g.data(), *plan, wmat->data(), wcols, t.grad(px).data());
      });
  return {input.tape, id};
}

}  // namespace

template <typename T>
Var<T> lift_correlate(Var<T> input, Var<T> kernels,
                      std::shared_ptr<const RotationOperator> op) {
  return se2_correlate(input, kernels, std::move(op), true, "lift_correlate");
}

template <typename T>
Var<T> group_correlate(Var<T> input, Var<T> kernels,
                       std::shared_ptr<const RotationOperator> op) {
  return se2_correlate(input, kernels, std::move(op), false, "group_correlate");
}

template <typename T>
Var<T> project_max_orientations(Var<T> input) {
  const Tensor<T>& x = input.value();
  if (x.rank() != 5)
    throw std::invalid_argument("project_max_orientations: input must be [B,H,W,N,C]");
  std::size_t outer = x.dim(0) * x.dim(1) * x.dim(2);
  std::size_t n = x.dim(3), c = x.dim(4);
  Tensor<T> out({x.dim(0), x.dim(1), x.dim(2), c});
  auto argmax = std::make_shared<std::vector<std::size_t>>(out.size());
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t ci = 0; ci < c; ++ci) {
      T best = x[(o * n + 0) * c + ci];
      std::size_t best_idx = (o * n + 0) * c + ci;
      for (std::size_t j = 1; j < n; ++j) {
        std::size_t idx = (o * n + j) * c + ci;
        if (x[idx] > best) {
          best = x[idx];
          best_idx = idx;
        }
      }
      out[o * c + ci] = best;
      (*argmax)[o * c + ci] = best_idx;
    }
  int id = input.tape->push_op(std::move(out), {input.id, -1, -1}, "project_max_orientations",
                               [argmax](Tape<T>& t, int self) {
                                 const Tensor<T>& g = t.node(self).grad;
                                 Tensor<T>& ga = t.grad(t.node(self).parents[0]);
                                 for (std::size_t i = 0; i < g.size(); ++i)
                                   ga[(*argmax)[i]] += g[i];
                               });
  return {input.tape, id};
}

template <typename T>
Var<T> project_mean_orientations(Var<T> input) {
  const Tensor<T>& x = input.value();
  if (x.rank() != 5)
    throw std::invalid_argument("project_mean_orientations: input must be [B,H,W,N,C]");
  std::size_t outer = x.dim(0) * x.dim(1) * x.dim(2);
  std::size_t n = x.dim(3), c = x.dim(4);
  Tensor<T> out({x.dim(0), x.dim(1), x.dim(2), c});
  T inv_n = T(1) / static_cast<T>(n);
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t ci = 0; ci < c; ++ci) {
      T acc = 0;
      for (std::size_t j = 0; j < n; ++j) acc += x[(o * n + j) * c + ci];
      out[o * c + ci] = acc * inv_n;
    }
  int id = input.tape->push_op(std::move(out), {input.id, -1, -1}, "project_mean_orientations",
                               [n, c, inv_n](Tape<T>& t, int self) {
                                 const Tensor<T>& g = t.node(self).grad;
                                 Tensor<T>& ga = t.grad(t.node(self).parents[0]);
                                 std::size_t outer2 = g.size() / c;
                                 for (std::size_t o = 0; o < outer2; ++o)
                                   for (std::size_t ci = 0; ci < c; ++ci)
                                     for (std::size_t j = 0; j < n; ++j)
                                       ga[(o * n + j) * c + ci] += g[o * c + ci] * inv_n;
                               });
  return {input.tape, id};
}

template <typename T>
Var<T> se2_max_pool(Var<T> input, int window) {
  if (input.value().rank() != 5)
    throw std::invalid_argument("se2_max_pool: input must be [B,H,W,N,C]");
  return max_pool2d(input, window);
}

template <typename T>
Var<T> rotate_kernel_stack(Var<T> base, std::shared_ptr<const RotationOperator> op) {
  const Tensor<T>& bv = base.value();
  if (!op) throw std::invalid_argument("rotate_kernel_stack: null rotation operator");
  const std::size_t m = op->mask.size();
  if (bv.rank() < 1 || bv.dim(bv.rank() - 1) != m)
    throw std::invalid_argument("rotate_kernel_stack: last axis must carry " +
                                std::to_string(m) + " mask coefficients, got " +
                                shape_str(bv.shape()));
  const std::size_t n = op->mask.n;
  const std::size_t no = op->n_orient;
  const std::size_t lead = bv.size() / m;
  std::vector<std::size_t> out_shape{n, n, no};
  for (std::size_t i = 0; i + 1 < bv.rank(); ++i) out_shape.push_back(bv.dim(i));

  Tensor<T> out(out_shape);
  std::vector<T> rotated(no * m);
  for (std::size_t l = 0; l < lead; ++l) {
    op->apply(bv.data() + l * m, rotated.data());
    for (std::size_t s = 0; s < m; ++s) {
      auto [r, c] = op->mask.positions[s];
      for (std::size_t i = 0; i < no; ++i)
        out[((std::size_t(r) * n + c) * no + i) * lead + l] = rotated[i * m + s];
    }
  }
  int id = base.tape->push_op(
      std::move(out), {base.id, -1, -1}, "rotate_kernel_stack",
      [op, lead](Tape<T>& t, int self) {
        const Tensor<T>& g = t.node(self).grad;
        Tensor<T>& gb = t.grad(t.node(self).parents[0]);
        const std::size_t m2 = op->mask.size();
        const std::size_t n2 = op->mask.n;
        const std::size_t no2 = op->n_orient;
        std::vector<T> up(no2 * m2);
        for (std::size_t l = 0; l < lead; ++l) {
          for (std::size_t s = 0; s < m2; ++s) {
            auto [r, c] = op->mask.positions[s];
            for (std::size_t i = 0; i < no2; ++i)
              up[i * m2 + s] = g[((std::size_t(r) * n2 + c) * no2 + i) * lead + l];
          }
          op->apply_transpose_add(up.data(), gb.data() + l * m2);
        }
      });
  return {base.tape, id};
}

#define SE2CONV_INSTANTIATE(T)                                                         \
  template Var<T> lift_correlate<T>(Var<T>, Var<T>,                                    \
                                    std::shared_ptr<const RotationOperator>);          \
  template Var<T> group_correlate<T>(Var<T>, Var<T>,                                   \
                                     std::shared_ptr<const RotationOperator>);         \
  template Var<T> project_max_orientations<T>(Var<T>);                                 \
  template Var<T> project_mean_orientations<T>(Var<T>);                                \
  template Var<T> se2_max_pool<T>(Var<T>, int);                                        \
  template Var<T> rotate_kernel_stack<T>(Var<T>,                                       \
                                         std::shared_ptr<const RotationOperator>);

SE2CONV_INSTANTIATE(float)
SE2CONV_INSTANTIATE(double)
#undef SE2CONV_INSTANTIATE

}  // namespace se2conv
