#include "se2conv/autograd.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>

#include "detail/conv_kernels.hpp"

namespace se2conv {

template <typename T>
const Tensor<T>& Var<T>::value() const {
  return tape->node(id).value;
}

template <typename T>
const Tensor<T>& Var<T>::grad() const {
  return tape->node(id).grad;
}

template struct Var<float>;
template struct Var<double>;

namespace {

template <typename T>
void require_finite(const Tensor<T>& t, const char* op) {
  if (!t.all_finite())
    throw std::runtime_error(std::string("non-finite values produced by op '") + op + "'");
}

template <typename T>
void require_same_shape(const Tensor<T>& a, const Tensor<T>& b, const char* op) {
  if (a.shape() != b.shape())
    throw std::invalid_argument(std::string(op) + ": shape mismatch " + shape_str(a.shape()) +
                                " vs " + shape_str(b.shape()));
}

}  // namespace

template <typename T>
int Tape<T>::push(Tensor<T> value, bool is_param) {
  if (check_finite) require_finite(value, is_param ? "parameter" : "input");
  Node n;
  n.value = std::move(value);
  n.is_param = is_param;
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

template <typename T>
int Tape<T>::push_op(Tensor<T> value, std::array<int, 3> parents, const char* op,
                     BackwardFn fn) {
  if (check_finite) require_finite(value, op);
  Node n;
  n.value = std::move(value);
  n.parents = parents;
  n.backward = std::move(fn);
  n.op = op;
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

template <typename T>
Tensor<T>& Tape<T>::grad(int id) {
  Node& n = node(id);
  if (n.grad.empty() && n.value.size() > 0) n.grad = Tensor<T>(n.value.shape());
  return n.grad;
}

template <typename T>
std::vector<int> Tape<T>::backward(int loss_id) {
  if (node(loss_id).value.size() != 1)
    throw std::invalid_argument("backward: loss must be a scalar node");
  // Mark everything the loss depends on.
  std::vector<char> needed(nodes_.size(), 0);
  std::vector<int> stack{loss_id};
  needed[static_cast<std::size_t>(loss_id)] = 1;
  while (!stack.empty()) {
    int id = stack.back();
    stack.pop_back();
    for (int p : node(id).parents)
      if (p >= 0 && !needed[static_cast<std::size_t>(p)]) {
        needed[static_cast<std::size_t>(p)] = 1;
        stack.push_back(p);
      }
  }
  grad(loss_id).fill(T(1));
  for (int id = loss_id; id >= 0; --id) {
    if (!needed[static_cast<std::size_t>(id)]) continue;
    Node& n = node(id);
    if (n.backward) n.backward(*this, id);
  }
  std::vector<int> disconnected;
  for (std::size_t id = 0; id < nodes_.size(); ++id) {
    if (nodes_[id].is_param && !needed[id]) {
      disconnected.push_back(static_cast<int>(id));
      std::fprintf(stderr, "warning: parameter node %zu does not influence the loss\n", id);
      grad(static_cast<int>(id));  // defined as zero
    }
  }
  return disconnected;
}

template class Tape<float>;
template class Tape<double>;

// --- elementwise and structural ops ------------------------------------------

template <typename T>
Var<T> add(Var<T> a, Var<T> b) {
  require_same_shape(a.value(), b.value(), "add");
  Tensor<T> out = a.value();
  const Tensor<T>& bv = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
  int id = a.tape->push_op(std::move(out), {a.id, b.id, -1}, "add",
                           [](Tape<T>& t, int self) {
                             const Tensor<T>& g = t.node(self).grad;
                             auto [pa, pb, _] = t.node(self).parents;
                             Tensor<T>& ga = t.grad(pa);
                             Tensor<T>& gb = t.grad(pb);
                             for (std::size_t i = 0; i < g.size(); ++i) {
                               ga[i] += g[i];
                               gb[i] += g[i];
                             }
                           });
  return {a.tape, id};
}

template <typename T>
Var<T> mul(Var<T> a, Var<T> b) {
  require_same_shape(a.value(), b.value(), "mul");
  Tensor<T> out = a.value();
  const Tensor<T>& bv = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
  int id = a.tape->push_op(std::move(out), {a.id, b.id, -1}, "mul",
                           [](Tape<T>& t, int self) {
                             const Tensor<T>& g = t.node(self).grad;
                             auto [pa, pb, _] = t.node(self).parents;
                             const Tensor<T>& av = t.node(pa).value;
                             const Tensor<T>& bv2 = t.node(pb).value;
                             Tensor<T>& ga = t.grad(pa);
                             Tensor<T>& gb = t.grad(pb);
                             for (std::size_t i = 0; i < g.size(); ++i) {
                               ga[i] += g[i] * bv2[i];
                               gb[i] += g[i] * av[i];
                             }
                           });
  return {a.tape, id};
}

template <typename T>
Var<T> scale(Var<T> a, T c) {
  Tensor<T> out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= c;
  int id = a.tape->push_op(std::move(out), {a.id, -1, -1}, "scale",
                           [c](Tape<T>& t, int self) {
                             const Tensor<T>& g = t.node(self).grad;
                             Tensor<T>& ga = t.grad(t.node(self).parents[0]);
                             for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * c;
                           });
  return {a.tape, id};
}

template <typename T>
Var<T> reshape(Var<T> a, std::vector<std::size_t> shape) {
  Tensor<T> out = a.value().reshaped(shape);
  int id = a.tape->push_op(std::move(out), {a.id, -1, -1}, "reshape",
                           [](Tape<T>& t, int self) {
                             const Tensor<T>& g = t.node(self).grad;
                             Tensor<T>& ga = t.grad(t.node(self).parents[0]);
                             for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
                           });
  return {a.tape, id};
}

template <typename T>
Var<T> sum(Var<T> a) {
  T acc = 0;
  const Tensor<T>& av = a.value();
  for (std::size_t i = 0; i < av.size(); ++i) acc += av[i];
  int id = a.tape->push_op(Tensor<T>({1}, acc), {a.id, -1, -1}, "sum",
                           [](Tape<T>& t, int self) {
                             T g = t.node(self).grad[0];
                             Tensor<T>& ga = t.grad(t.node(self).parents[0]);
                             for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g;
                           });
  return {a.tape, id};
}

template <typename T>
Var<T> mean(Var<T> a) {
  return scale(sum(a), T(1) / static_cast<T>(a.value().size()));
}

template <typename T>
Var<T> dot_const(Var<T> a, Tensor<T> weights) {
  require_same_shape(a.value(), weights, "dot_const");
  const Tensor<T>& av = a.value();
  T acc = 0;
  for (std::size_t i = 0; i < av.size(); ++i) acc += av[i] * weights[i];
  auto w = std::make_shared<Tensor<T>>(std::move(weights));
  int id = a.tape->push_op(Tensor<T>({1}, acc), {a.id, -1, -1}, "dot_const",
                           [w](Tape<T>& t, int self) {
                             T g = t.node(self).grad[0];
                             Tensor<T>& ga = t.grad(t.node(self).parents[0]);
                             for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g * (*w)[i];
                           });
  return {a.tape, id};
}

template <typename T>
Var<T> relu(Var<T> a) {
  Tensor<T> out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = out[i] > T(0) ? out[i] : T(0);
  int id = a.tape->push_op(std::move(out), {a.id, -1, -1}, "relu",
                           [](Tape<T>& t, int self) {
                             const Tensor<T>& g = t.node(self).grad;
                             int p = t.node(self).parents[0];
                             const Tensor<T>& v = t.node(p).value;
                             Tensor<T>& ga = t.grad(p);
                             for (std::size_t i = 0; i < g.size(); ++i)
                               if (v[i] > T(0)) ga[i] += g[i];
                           });
  return {a.tape, id};
}

template <typename T>
Var<T> add_channel_bias(Var<T> a, Var<T> bias) {
  const Tensor<T>& av = a.value();
  const Tensor<T>& bv = bias.value();
  if (av.rank() < 1 || bv.rank() != 1 || bv.dim(0) != av.dim(av.rank() - 1))
    throw std::invalid_argument("add_channel_bias: bias must match the last axis");
  std::size_t ch = bv.dim(0);
  Tensor<T> out = av;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i % ch];
  int id = a.tape->push_op(std::move(out), {a.id, bias.id, -1}, "add_channel_bias",
                           [ch](Tape<T>& t, int self) {
                             const Tensor<T>& g = t.node(self).grad;
                             auto [pa, pb, _] = t.node(self).parents;
                             Tensor<T>& ga = t.grad(pa);
                             Tensor<T>& gb = t.grad(pb);
                             for (std::size_t i = 0; i < g.size(); ++i) {
                               ga[i] += g[i];
                               gb[i % ch] += g[i];
                             }
                           });
  return {a.tape, id};
}

// --- correlation --------------------------------------------------------------

template <typename T>
Var<T> correlate2d(Var<T> input, Var<T> kernels, Padding padding, int stride) {
  const Tensor<T>& x = input.value();
  const Tensor<T>& k = kernels.value();
  if (x.rank() != 3 && x.rank() != 4)
    throw std::invalid_argument("correlate2d: input must be [H,W,Cin] or [B,H,W,Cin]");
  bool batched = x.rank() == 4;
  std::size_t b = batched ? x.dim(0) : 1;
  std::size_t h = x.dim(batched ? 1 : 0), w = x.dim(batched ? 2 : 1);
  std::size_t cin = x.dim(batched ? 3 : 2);
  if (k.rank() != 4 || k.dim(0) != k.dim(1))
    throw std::invalid_argument("correlate2d: kernels must be [n,n,Cin,Cout]");
  if (k.dim(2) != cin)
    throw std::invalid_argument("correlate2d: channel mismatch, input " + shape_str(x.shape()) +
                                " kernels " + shape_str(k.shape()));
  int n = static_cast<int>(k.dim(0));
  std::size_t cout = k.dim(3);
  auto plan = std::make_shared<detail::ConvPlan>(
      detail::make_conv_plan(static_cast<int>(b), static_cast<int>(h), static_cast<int>(w),
                             static_cast<int>(cin), n, padding, stride));
  std::vector<std::size_t> out_shape =
      batched ? std::vector<std::size_t>{b, std::size_t(plan->out_h), std::size_t(plan->out_w),
                                         cout}
              : std::vector<std::size_t>{std::size_t(plan->out_h), std::size_t(plan->out_w),
                                         cout};
  Tensor<T> out(out_shape);
  detail::conv_forward(x.data(), *plan, k.data(), cout, out.data());
  int id = input.tape->push_op(
      std::move(out), {input.id, kernels.id, -1}, "correlate2d",
      [plan, cout](Tape<T>& t, int self) {
        const Tensor<T>& g = t.node(self).grad;
        auto [px, pk, _] = t.node(self).parents;
        const Tensor<T>& xv = t.node(px).value;
        const Tensor<T>& kv = t.node(pk).value;
        detail::conv_grad_weights(xv.data(), *plan, g.data(), cout, t.grad(pk).data(), true);
        detail::conv_grad_input_add(g.data(), *plan, kv.data(), cout, t.grad(px).data());
      });
  return {input.tape, id};
}

// --- pooling -------------------------------------------------------------------

namespace {

// Pool axes are (0,1) for rank <= 3 and (1,2) otherwise.
template <typename T>
void pool_geometry(const Tensor<T>& x, int window, std::size_t& b, std::size_t& h,
                   std::size_t& w, std::size_t& k, std::vector<std::size_t>& out_shape) {
  if (x.rank() < 2) throw std::invalid_argument("max_pool2d: rank must be >= 2");
  std::size_t axis = x.rank() <= 3 ? 0 : 1;
  b = axis == 0 ? 1 : x.dim(0);
  h = x.dim(axis);
  w = x.dim(axis + 1);
  k = 1;
  for (std::size_t i = axis + 2; i < x.rank(); ++i) k *= x.dim(i);
  if (window < 1 || h % window != 0 || w % window != 0)
    throw std::invalid_argument("max_pool2d: spatial dims " + std::to_string(h) + "x" +
                                std::to_string(w) + " not divisible by window " +
                                std::to_string(window));
  out_shape = x.shape();
  out_shape[axis] = h / window;
  out_shape[axis + 1] = w / window;
}

}  // namespace

template <typename T>
Var<T> max_pool2d(Var<T> input, int window) {
  const Tensor<T>& x = input.value();
  std::size_t b, h, w, k;
  std::vector<std::size_t> out_shape;
  pool_geometry(x, window, b, h, w, k, out_shape);
  std::size_t ho = h / window, wo = w / window;
  Tensor<T> out(out_shape);
  auto argmax = std::make_shared<std::vector<std::size_t>>(out.size());
  std::size_t o = 0;
  for (std::size_t bi = 0; bi < b; ++bi)
    for (std::size_t oy = 0; oy < ho; ++oy)
      for (std::size_t ox = 0; ox < wo; ++ox)
        for (std::size_t c = 0; c < k; ++c, ++o) {
          T best = -std::numeric_limits<T>::infinity();
          std::size_t best_idx = 0;
          for (int dy = 0; dy < window; ++dy)
            for (int dx = 0; dx < window; ++dx) {
              std::size_t iy = oy * window + dy, ix = ox * window + dx;
              std::size_t idx = ((bi * h + iy) * w + ix) * k + c;
              if (x[idx] > best) {
                best = x[idx];
                best_idx = idx;
              }
            }
          out[o] = best;
          (*argmax)[o] = best_idx;
        }
  int id = input.tape->push_op(std::move(out), {input.id, -1, -1}, "max_pool2d",
                               [argmax](Tape<T>& t, int self) {
                                 const Tensor<T>& g = t.node(self).grad;
                                 Tensor<T>& ga = t.grad(t.node(self).parents[0]);
                                 for (std::size_t i = 0; i < g.size(); ++i)
                                   ga[(*argmax)[i]] += g[i];
                               });
  return {input.tape, id};
}

template <typename T>
Var<T> global_spatial_max(Var<T> input) {
  const Tensor<T>& x = input.value();
  if (x.rank() != 4) throw std::invalid_argument("global_spatial_max: input must be [B,H,W,C]");
  std::size_t b = x.dim(0), h = x.dim(1), w = x.dim(2), c = x.dim(3);
  Tensor<T> out({b, c});
  auto argmax = std::make_shared<std::vector<std::size_t>>(out.size());
  for (std::size_t bi = 0; bi < b; ++bi)
    for (std::size_t ci = 0; ci < c; ++ci) {
      T best = -std::numeric_limits<T>::infinity();
      std::size_t best_idx = 0;
      for (std::size_t y = 0; y < h; ++y)
        for (std::size_t xx = 0; xx < w; ++xx) {
          std::size_t idx = ((bi * h + y) * w + xx) * c + ci;
          if (x[idx] > best) {
            best = x[idx];
            best_idx = idx;
          }
        }
      out[bi * c + ci] = best;
      (*argmax)[bi * c + ci] = best_idx;
    }
  int id = input.tape->push_op(std::move(out), {input.id, -1, -1}, "global_spatial_max",
                               [argmax](Tape<T>& t, int self) {
                                 const Tensor<T>& g = t.node(self).grad;
                                 Tensor<T>& ga = t.grad(t.node(self).parents[0]);
                                 for (std::size_t i = 0; i < g.size(); ++i)
                                   ga[(*argmax)[i]] += g[i];
                               });
  return {input.tape, id};
}

// --- batch norm ----------------------------------------------------------------

template <typename T>
Var<T> batch_norm(Var<T> input, Var<T> scale_v, Var<T> shift_v, BatchNormState<T>* state,
                  T epsilon, BnMode mode, bool update_running) {
  const Tensor<T>& x = input.value();
  if (x.rank() < 2) throw std::invalid_argument("batch_norm: rank must be >= 2");
  std::size_t ch = x.dim(x.rank() - 1);
  if (scale_v.value().size() != ch || shift_v.value().size() != ch)
    throw std::invalid_argument("batch_norm: scale/shift must have one entry per channel");
  if (mode == BnMode::Inference && state == nullptr)
    throw std::invalid_argument("batch_norm: inference mode needs running statistics");
  std::size_t rows = x.size() / ch;

  auto mean_c = std::make_shared<std::vector<T>>(ch, T(0));
  auto inv_std_c = std::make_shared<std::vector<T>>(ch, T(0));
  if (mode == BnMode::Train) {
    for (std::size_t i = 0; i < x.size(); ++i) (*mean_c)[i % ch] += x[i];
    for (std::size_t c = 0; c < ch; ++c) (*mean_c)[c] /= static_cast<T>(rows);
    std::vector<T> var_c(ch, T(0));
    for (std::size_t i = 0; i < x.size(); ++i) {
      T d = x[i] - (*mean_c)[i % ch];
      var_c[i % ch] += d * d;
    }
    for (std::size_t c = 0; c < ch; ++c) var_c[c] /= static_cast<T>(rows);
    for (std::size_t c = 0; c < ch; ++c)
      (*inv_std_c)[c] = T(1) / std::sqrt(var_c[c] + epsilon);
    if (update_running) {
      if (state == nullptr)
        throw std::invalid_argument("batch_norm: update_running needs a state");
      // EMA over ~100 recent batches: long enough to average out per-batch
      // sampling noise, short enough to converge during a post-training
      // statistics-refresh pass (see train()).
      const T alpha = T(0.01);
      for (std::size_t c = 0; c < ch; ++c) {
        state->running_mean[c] = (T(1) - alpha) * state->running_mean[c] + alpha * (*mean_c)[c];
        state->running_var[c] = (T(1) - alpha) * state->running_var[c] + alpha * var_c[c];
      }
    }
  } else {
    for (std::size_t c = 0; c < ch; ++c) {
      (*mean_c)[c] = state->running_mean[c];
      (*inv_std_c)[c] = T(1) / std::sqrt(state->running_var[c] + epsilon);
    }
  }

  const Tensor<T>& gamma = scale_v.value();
  const Tensor<T>& beta = shift_v.value();
  Tensor<T> out(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::size_t c = i % ch;
    out[i] = gamma[c] * (x[i] - (*mean_c)[c]) * (*inv_std_c)[c] + beta[c];
  }

  int id = input.tape->push_op(
      std::move(out), {input.id, scale_v.id, shift_v.id}, "batch_norm",
      [mean_c, inv_std_c, ch, rows, mode](Tape<T>& t, int self) {
        const Tensor<T>& g = t.node(self).grad;
        auto [px, ps, pb] = t.node(self).parents;
        const Tensor<T>& xv = t.node(px).value;
        const Tensor<T>& gamma2 = t.node(ps).value;
        Tensor<T>& gx = t.grad(px);
        Tensor<T>& gs = t.grad(ps);
        Tensor<T>& gb = t.grad(pb);
        std::vector<T> sum_g(ch, T(0)), sum_gxhat(ch, T(0));
        for (std::size_t i = 0; i < g.size(); ++i) {
          std::size_t c = i % ch;
          T xhat = (xv[i] - (*mean_c)[c]) * (*inv_std_c)[c];
          sum_g[c] += g[i];
          sum_gxhat[c] += g[i] * xhat;
        }
        for (std::size_t c = 0; c < ch; ++c) {
          gb[c] += sum_g[c];
          gs[c] += sum_gxhat[c];
        }
        if (mode == BnMode::Train) {
          T inv_rows = T(1) / static_cast<T>(rows);
          for (std::size_t i = 0; i < g.size(); ++i) {
            std::size_t c = i % ch;
            T xhat = (xv[i] - (*mean_c)[c]) * (*inv_std_c)[c];
            gx[i] += gamma2[c] * (*inv_std_c)[c] *
                     (g[i] - sum_g[c] * inv_rows - xhat * sum_gxhat[c] * inv_rows);
          }
        } else {
          for (std::size_t i = 0; i < g.size(); ++i) {
            std::size_t c = i % ch;
            gx[i] += gamma2[c] * (*inv_std_c)[c] * g[i];
          }
        }
      });
  return {input.tape, id};
}

// --- loss -----------------------------------------------------------------------

template <typename T>
Var<T> logistic_loss(Var<T> logits, const Tensor<T>& labels) {
  const Tensor<T>& z = logits.value();
  require_same_shape(z, labels, "logistic_loss");
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] != T(0) && labels[i] != T(1))
      throw std::invalid_argument("logistic_loss: labels must be exactly 0 or 1");
  T acc = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    T zi = z[i];
    acc += std::max(zi, T(0)) - zi * labels[i] + std::log1p(std::exp(-std::abs(zi)));
  }
  acc /= static_cast<T>(z.size());
  auto y = std::make_shared<Tensor<T>>(labels);
  int id = logits.tape->push_op(
      Tensor<T>({1}, acc), {logits.id, -1, -1}, "logistic_loss",
      [y](Tape<T>& t, int self) {
        T g = t.node(self).grad[0];
        int p = t.node(self).parents[0];
        const Tensor<T>& zv = t.node(p).value;
        Tensor<T>& gz = t.grad(p);
        T inv_n = T(1) / static_cast<T>(zv.size());
        for (std::size_t i = 0; i < zv.size(); ++i) {
          T s = T(1) / (T(1) + std::exp(-zv[i]));
          gz[i] += g * (s - (*y)[i]) * inv_n;
        }
      });
  return {logits.tape, id};
}

// --- optimizer and oracle ---------------------------------------------------------

template <typename T>
void sgd_momentum_step(Tensor<T>& param, Tensor<T>& velocity, const Tensor<T>& grad, T lr,
                       T momentum) {
  require_same_shape(param, grad, "sgd_momentum_step");
  if (velocity.empty()) velocity = Tensor<T>(param.shape());
  require_same_shape(param, velocity, "sgd_momentum_step");
  for (std::size_t i = 0; i < param.size(); ++i) {
    velocity[i] = momentum * velocity[i] - lr * grad[i];
    param[i] += velocity[i];
  }
}

template <typename T>
Tensor<T> finite_difference_gradient(const std::function<T(const Tensor<T>&)>& f,
                                     const Tensor<T>& x, T epsilon) {
  Tensor<T> grad(x.shape());
  Tensor<T> probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    T orig = probe[i];
    probe[i] = orig + epsilon;
    T hi = f(probe);
    probe[i] = orig - epsilon;
    T lo = f(probe);
    probe[i] = orig;
    grad[i] = (hi - lo) / (T(2) * epsilon);
  }
  return grad;
}

#define SE2CONV_INSTANTIATE(T)                                                              \
  template Var<T> add<T>(Var<T>, Var<T>);                                                   \
  template Var<T> mul<T>(Var<T>, Var<T>);                                                   \
  template Var<T> scale<T>(Var<T>, T);                                                      \
  template Var<T> reshape<T>(Var<T>, std::vector<std::size_t>);                             \
  template Var<T> sum<T>(Var<T>);                                                           \
  template Var<T> mean<T>(Var<T>);                                                          \
  template Var<T> dot_const<T>(Var<T>, Tensor<T>);                                          \
  template Var<T> relu<T>(Var<T>);                                                          \
  template Var<T> add_channel_bias<T>(Var<T>, Var<T>);                                      \
  template Var<T> correlate2d<T>(Var<T>, Var<T>, Padding, int);                             \
  template Var<T> max_pool2d<T>(Var<T>, int);                                               \
  template Var<T> global_spatial_max<T>(Var<T>);                                            \
  template Var<T> batch_norm<T>(Var<T>, Var<T>, Var<T>, BatchNormState<T>*, T, BnMode,     \
                                bool);                                                      \
  template Var<T> logistic_loss<T>(Var<T>, const Tensor<T>&);                               \
  template void sgd_momentum_step<T>(Tensor<T>&, Tensor<T>&, const Tensor<T>&, T, T);       \
  template Tensor<T> finite_difference_gradient<T>(                                         \
      const std::function<T(const Tensor<T>&)>&, const Tensor<T>&, T);

SE2CONV_INSTANTIATE(float)
SE2CONV_INSTANTIATE(double)
#undef SE2CONV_INSTANTIATE

}  // namespace se2conv
