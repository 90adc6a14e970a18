#pragma once

#include <array>
#include <functional>
#include <vector>

#include "se2conv/tensor.hpp"

namespace se2conv {

enum class Padding { SameZero, Valid };
enum class BnMode { Train, Inference };

template <typename T>
struct BatchNormState {
  Tensor<T> running_mean;  // per channel
  Tensor<T> running_var;
};

template <typename T>
class Tape;

// Lightweight handle to a node on a tape.
template <typename T>
struct Var {
  Tape<T>* tape = nullptr;
  int id = -1;

  const Tensor<T>& value() const;
  const Tensor<T>& grad() const;
};

// Record of executed operations in topological (execution) order. Backward
// replays it once, in reverse, accumulating gradients.
template <typename T>
class Tape {
 public:
  using BackwardFn = std::function<void(Tape<T>&, int)>;

  struct Node {
    Tensor<T> value;
    Tensor<T> grad;  // allocated on first accumulation
    std::array<int, 3> parents{{-1, -1, -1}};
    BackwardFn backward;
    const char* op = "leaf";
    bool is_param = false;
  };

  Var<T> input(Tensor<T> value) { return {this, push(std::move(value), false)}; }
  Var<T> parameter(Tensor<T> value) { return {this, push(std::move(value), true)}; }

  int push(Tensor<T> value, bool is_param);
  int push_op(Tensor<T> value, std::array<int, 3> parents, const char* op, BackwardFn fn);

  Node& node(int id) { return nodes_[static_cast<std::size_t>(id)]; }
  const Node& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
  std::size_t size() const { return nodes_.size(); }

  // Gradient buffer of a node, allocated as zeros on first use.
  Tensor<T>& grad(int id);

  // Reverse-mode sweep from a scalar loss node. Every node reachable from the
  // loss is visited exactly once, in reverse execution order. Parameters that
  // the loss does not depend on keep a zero gradient and are reported through
  // the returned warning list.
  std::vector<int> backward(int loss_id);

  void reset() { nodes_.clear(); }

  // When set, every op verifies its output is finite and throws otherwise.
  bool check_finite = true;

 private:
  std::vector<Node> nodes_;
};

// --- fixed op set -----------------------------------------------------------

template <typename T>
Var<T> add(Var<T> a, Var<T> b);
template <typename T>
Var<T> mul(Var<T> a, Var<T> b);
template <typename T>
Var<T> scale(Var<T> a, T c);
template <typename T>
Var<T> reshape(Var<T> a, std::vector<std::size_t> shape);
template <typename T>
Var<T> sum(Var<T> a);
template <typename T>
Var<T> mean(Var<T> a);
// Inner product with a constant tensor; handy as a generic scalar head in
// gradient checks.
template <typename T>
Var<T> dot_const(Var<T> a, Tensor<T> weights);

template <typename T>
Var<T> relu(Var<T> a);

// Adds a per-channel bias over the last axis.
template <typename T>
Var<T> add_channel_bias(Var<T> a, Var<T> bias);

// Cross-correlation of [B,H,W,Cin] with kernels [n,n,Cin,Cout].
// SameZero keeps the spatial size (stride 1); Valid shrinks it.
template <typename T>
Var<T> correlate2d(Var<T> input, Var<T> kernels, Padding padding = Padding::SameZero,
                   int stride = 1);

// Non-overlapping spatial max over axes 1,2 of [B,H,W,...]; gradient goes to
// the argmax, lowest linear index on ties.
template <typename T>
Var<T> max_pool2d(Var<T> input, int window);

// Spatial max over all of H,W: [B,H,W,C] -> [B,C].
template <typename T>
Var<T> global_spatial_max(Var<T> input);

// Channel-last batch normalization; statistics pool over every axis except
// the last. `state` may be null when mode == Train and update_running is
// false.
template <typename T>
Var<T> batch_norm(Var<T> input, Var<T> scale, Var<T> shift, BatchNormState<T>* state, T epsilon,
                  BnMode mode, bool update_running);

// Mean elementwise binary cross-entropy on logits, log-sum-exp form.
// Labels must be exactly 0 or 1.
template <typename T>
Var<T> logistic_loss(Var<T> logits, const Tensor<T>& labels);

// --- optimizer and oracle ----------------------------------------------------

// v <- momentum * v - lr * g;  p <- p + v
template <typename T>
void sgd_momentum_step(Tensor<T>& param, Tensor<T>& velocity, const Tensor<T>& grad, T lr,
                       T momentum);

// Central differences (f(x+eps e) - f(x-eps e)) / (2 eps) per coordinate.
template <typename T>
Tensor<T> finite_difference_gradient(const std::function<T(const Tensor<T>&)>& f,
                                     const Tensor<T>& x, T epsilon);

extern template class Tape<float>;
extern template class Tape<double>;

}  // namespace se2conv
