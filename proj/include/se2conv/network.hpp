#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "se2conv/autograd.hpp"
#include "se2conv/gcnn.hpp"

namespace se2conv {

// Six-layer chain: lifting -> 3x group conv -> group conv (1x1) ->
// orientation projection -> planar 1x1 conv. Layers 1-5 carry batch norm
// (scale + shift per channel); layer 6 carries a bias per channel.
struct NetworkConfig {
  enum class Head { GlobalMax, PerPixel };
  enum class Projection { Max, Mean };

  int n_orient = 8;
  int in_channels = 3;
  std::array<int, 6> channels{8, 8, 8, 8, 16, 1};
  std::array<int, 6> kernel_sizes{5, 5, 5, 5, 1, 1};
  std::vector<int> pool_layers;  // 1-based; 2x2 spatial max pool after that layer
  Head head = Head::GlobalMax;
  Projection projection = Projection::Max;
  double bn_epsilon = 1e-5;
};

// Stock channel layout for an orientation count. The five tabulated counts
// keep the total weight budget within a few percent of each other; other N
// reuse the closest tabulated layout from below.
std::array<int, 6> default_channels(int n_orient);
NetworkConfig make_default_config(int n_orient);

template <typename T>
struct Model {
  NetworkConfig config;
  // Trainable tensors in fixed order; names are stable and serialized.
  std::vector<std::pair<std::string, Tensor<T>>> params;
  std::vector<Tensor<T>> velocity;           // optimizer state, parallel to params
  std::vector<BatchNormState<T>> bn_states;  // layers 1..5
  // Kernel-rotation operators keyed by kernel size, shared across layers.
  std::vector<std::pair<int, std::shared_ptr<const RotationOperator>>> operators;

  Tensor<T>& param(const std::string& name);
  const Tensor<T>& param(const std::string& name) const;
  std::shared_ptr<const RotationOperator> op_for(int kernel_size) const;
};

// Allocates parameters (zero-filled; see init_weights) and rotation operators.
template <typename T>
Model<T> build_network(const NetworkConfig& config);

struct WeightCount {
  std::array<long long, 6> per_layer{};
  long long total = 0;
};
// Trainable scalar count per layer and in total, from the actual tensors.
template <typename T>
WeightCount count_weights(const Model<T>& model);

// Kernel coefficients ~ N(0, 2/fan_in) with fan_in = mask size x kernel
// orientations x input channels; batch-norm scale 1, shift 0, bias 0.
// Running statistics reset to mean 0, variance 1.
template <typename T>
void init_weights(Model<T>& model, std::uint64_t seed);

template <typename T>
struct ForwardPass {
  Var<T> logits;               // [B, C6] for GlobalMax head, [B,H',W',C6] for PerPixel
  std::vector<Var<T>> params;  // parameter nodes, parallel to model.params
};

// Registers the parameters on the tape and runs the chain on a [B,H,W,Cin]
// batch. Training uses mode=Train with update_running=true; evaluation uses
// mode=Inference.
template <typename T>
ForwardPass<T> forward(Model<T>& model, Tape<T>& tape, const Tensor<T>& batch, BnMode mode,
                       bool update_running);

// Model file: magic "SE2M", version byte, length-prefixed key=value config
// text, then named tensor blocks (parameters, then batch-norm running
// statistics). Writing is atomic; round-trips are byte-identical.
template <typename T>
void save_model(const Model<T>& model, const std::string& path);
template <typename T>
Model<T> load_model(const std::string& path);

}  // namespace se2conv
