// Python bindings: forward-value wrappers over the orientation layers, the
// grid transforms, the rotation operator, and a small model facade.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <functional>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "se2conv/datasets.hpp"
#include "se2conv/equivariance.hpp"
#include "se2conv/network.hpp"
#include "se2conv/rotation_op.hpp"
#include "se2conv/se2.hpp"
#include "se2conv/train.hpp"

namespace py = pybind11;
using namespace se2conv;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Tensor<double> to_tensor(const Array& a) {
  std::vector<std::size_t> shape(a.ndim());
  for (py::ssize_t i = 0; i < a.ndim(); ++i) shape[std::size_t(i)] = std::size_t(a.shape(i));
  Tensor<double> t(std::move(shape));
  std::memcpy(t.data(), a.data(), sizeof(double) * t.size());
  return t;
}

Array to_array(const Tensor<double>& t) {
  std::vector<py::ssize_t> shape(t.rank());
  for (std::size_t i = 0; i < t.rank(); ++i) shape[i] = py::ssize_t(t.dim(i));
  Array a(shape);
  std::memcpy(a.mutable_data(), t.data(), sizeof(double) * t.size());
  return a;
}

// Runs a tape op on constant inputs and returns the forward value.
template <typename Fn>
Array run_forward(Fn&& fn) {
  Tape<double> tape;
  return to_array(fn(tape).value());
}

Array batched(const Array& in, int extra_rank,
              const std::function<Tensor<double>(Tape<double>&, const Tensor<double>&)>& fn) {
  // Accepts either a single item or a batch (extra leading axis).
  Tensor<double> t = to_tensor(in);
  bool single = t.rank() == std::size_t(extra_rank);
  if (single) {
    std::vector<std::size_t> s{1};
    for (std::size_t i = 0; i < t.rank(); ++i) s.push_back(t.dim(i));
    t = t.reshaped(s);
  } else if (t.rank() != std::size_t(extra_rank) + 1) {
    throw std::invalid_argument("expected a rank-" + std::to_string(extra_rank) +
                                " item or a batch of them");
  }
  Tape<double> tape;
  Tensor<double> out = fn(tape, t);
  if (single) {
    std::vector<std::size_t> s(out.shape().begin() + 1, out.shape().end());
    out = out.reshaped(s);
  }
  return to_array(out);
}

NetworkConfig config_of(int n_orient, const std::vector<int>& channels,
                        const std::vector<int>& pool_layers, const std::string& head,
                        const std::string& projection, int in_channels) {
  NetworkConfig cfg = make_default_config(n_orient);
  cfg.in_channels = in_channels;
  if (!channels.empty()) {
    if (channels.size() != 6) throw std::invalid_argument("channels needs six entries");
    for (int i = 0; i < 6; ++i) cfg.channels[std::size_t(i)] = channels[std::size_t(i)];
  }
  cfg.pool_layers = pool_layers;
  if (head == "perpixel")
    cfg.head = NetworkConfig::Head::PerPixel;
  else if (head != "globalmax")
    throw std::invalid_argument("head must be 'globalmax' or 'perpixel'");
  if (projection == "mean")
    cfg.projection = NetworkConfig::Projection::Mean;
  else if (projection != "max")
    throw std::invalid_argument("projection must be 'max' or 'mean'");
  return cfg;
}

// Thin façade over Model<double> for the smoke tests and notebooks.
struct PyNetwork {
  Model<double> model;

  explicit PyNetwork(Model<double> m) : model(std::move(m)) {}

  Array forward_batch(const Array& batch) {
    Tensor<double> t = to_tensor(batch);
    Tape<double> tape;
    auto fp = forward(model, tape, t, BnMode::Inference, false);
    return to_array(fp.logits.value());
  }

  std::vector<double> fit(const Array& patches, const Array& labels, int iterations,
                          int batch_size, double learning_rate, double momentum,
                          std::uint64_t seed, const std::string& augment, int bn_refresh) {
    LabeledPatchSet<double> data;
    data.patches = to_tensor(patches);
    data.labels = to_tensor(labels);
    TrainSettings settings;
    settings.iterations = iterations;
    settings.batch_size = batch_size;
    settings.learning_rate = learning_rate;
    settings.momentum = momentum;
    settings.seed = seed;
    settings.bn_refresh_batches = bn_refresh;
    settings.log_every = iterations + 1;  // quiet
    if (augment == "transpose")
      settings.augment = AugmentMode::Transpose;
    else if (augment == "rot90")
      settings.augment = AugmentMode::TransposeRot90;
    else if (augment != "none")
      throw std::invalid_argument("augment must be 'none', 'transpose', or 'rot90'");
    return train(model, data, settings, nullptr).losses;
  }
};

}  // namespace

PYBIND11_MODULE(_se2conv, m) {
  m.doc() = "SE(2,N) group-equivariant CNN layers and transforms";

  m.def(
      "disk_mask",
      [](int n) {
        DiskMask mask = build_disk_mask(n);
        py::array_t<int> out({py::ssize_t(mask.size()), py::ssize_t(2)});
        auto view = out.mutable_unchecked<2>();
        for (std::size_t s = 0; s < mask.size(); ++s) {
          view(py::ssize_t(s), 0) = mask.positions[s].first;
          view(py::ssize_t(s), 1) = mask.positions[s].second;
        }
        return out;
      },
      py::arg("kernel_size"),
      "Row-major (row, col) positions inside the kernel's disk mask");

  m.def(
      "rotation_operator",
      [](int kernel_size, int n_orientations) {
        RotationOperator op = build_rotation_operator(kernel_size, n_orientations);
        py::dict d;
        d["rows"] = py::array_t<int>(py::ssize_t(op.rows.size()), op.rows.data());
        d["cols"] = py::array_t<int>(py::ssize_t(op.cols.size()), op.cols.data());
        d["vals"] = py::array_t<double>(py::ssize_t(op.vals.size()), op.vals.data());
        d["shape"] = py::make_tuple(op.nrows(), op.ncols());
        return d;
      },
      py::arg("kernel_size"), py::arg("n_orientations"),
      "Sparse COO triplets of the kernel-rotation operator");

  m.def(
      "rotate_kernels",
      [](const Array& base, int kernel_size, int n_orientations) {
        auto op = std::make_shared<const RotationOperator>(
            build_rotation_operator(kernel_size, n_orientations));
        return run_forward([&](Tape<double>& tape) {
          return rotate_kernel_stack(tape.parameter(to_tensor(base)), op);
        });
      },
      py::arg("base"), py::arg("kernel_size"), py::arg("n_orientations"),
      "Dense [n, n, N, ...] stack of rotated copies of disk-masked kernels");

  m.def(
      "lift",
      [](const Array& image, const Array& kernels, int n_orientations, int kernel_size) {
        auto op = std::make_shared<const RotationOperator>(
            build_rotation_operator(kernel_size, n_orientations));
        Tensor<double> k = to_tensor(kernels);
        return batched(image, 3, [&](Tape<double>& tape, const Tensor<double>& t) {
          return lift_correlate(tape.parameter(t), tape.parameter(k), op).value();
        });
      },
      py::arg("image"), py::arg("kernels"), py::arg("n_orientations"), py::arg("kernel_size") = 5,
      "Lifting correlation: [H,W,Cin] (or a batch) x [Cout,Cin,M] -> [H,W,N,Cout]");

  m.def(
      "group_correlate",
      [](const Array& stack, const Array& kernels, int kernel_size) {
        Tensor<double> k = to_tensor(kernels);
        if (k.rank() != 4) throw std::invalid_argument("kernels must be [Cout,Cin,N,M]");
        auto op = std::make_shared<const RotationOperator>(
            build_rotation_operator(kernel_size, int(k.dim(2))));
        return batched(stack, 4, [&](Tape<double>& tape, const Tensor<double>& t) {
          return group_correlate(tape.parameter(t), tape.parameter(k), op).value();
        });
      },
      py::arg("stack"), py::arg("kernels"), py::arg("kernel_size") = 5,
      "Group correlation: [H,W,N,Cin] (or a batch) x [Cout,Cin,N,M] -> [H,W,N,Cout]");

  m.def(
      "project",
      [](const Array& stack, const std::string& mode) {
        return batched(stack, 4, [&](Tape<double>& tape, const Tensor<double>& t) {
          Var<double> v = tape.parameter(t);
          if (mode == "mean") return project_mean_orientations(v).value();
          if (mode != "max") throw std::invalid_argument("mode must be 'max' or 'mean'");
          return project_max_orientations(v).value();
        });
      },
      py::arg("stack"), py::arg("mode") = "max",
      "Collapse the orientation axis: [H,W,N,C] (or a batch) -> [H,W,C]");

  m.def(
      "roto_translate",
      [](const Array& image, double x, double y, double theta) {
        return to_array(apply_roto_translation(to_tensor(image), GroupElement{x, y, theta}));
      },
      py::arg("image"), py::arg("x") = 0.0, py::arg("y") = 0.0, py::arg("theta") = 0.0,
      "Roto-translate an [H,W,C] image (bilinear, zero outside)");

  m.def(
      "shift_twist",
      [](const Array& stack, double x, double y, int k) {
        Tensor<double> t = to_tensor(stack);
        if (t.rank() != 4) throw std::invalid_argument("stack must be [H,W,N,C]");
        int n = int(t.dim(2));
        return to_array(apply_shift_twist(t, DiscreteGroupElement{x, y, k, n}));
      },
      py::arg("stack"), py::arg("x") = 0.0, py::arg("y") = 0.0, py::arg("k") = 1,
      "Shift-twist an [H,W,N,C] stack: roto-translate planes and roll orientations");

  m.def(
      "synth_rotated_patterns",
      [](std::size_t count, std::uint64_t seed) {
        LabeledPatchSet<double> ds = synth_rotated_patterns<double>(count, seed);
        return py::make_tuple(to_array(ds.patches), to_array(ds.labels));
      },
      py::arg("count"), py::arg("seed") = 0,
      "Synthetic junction-classification patches: (patches, labels)");

  m.def(
      "gaussian_mixture_image",
      [](int h, int w, int c, int blobs, double sigma_lo, double sigma_hi, std::uint64_t seed) {
        return to_array(gaussian_mixture_image<double>(h, w, c, blobs, sigma_lo, sigma_hi, seed));
      },
      py::arg("h"), py::arg("w"), py::arg("c") = 1, py::arg("blobs") = 4,
      py::arg("sigma_lo") = 2.0, py::arg("sigma_hi") = 3.5, py::arg("seed") = 0,
      "Band-limited random test image [H,W,C]");

  py::class_<PyNetwork>(m, "Network")
      .def(py::init([](int n_orientations, const std::vector<int>& channels,
                       const std::vector<int>& pool_layers, const std::string& head,
                       const std::string& projection, int in_channels, std::uint64_t seed) {
             Model<double> model = build_network<double>(
                 config_of(n_orientations, channels, pool_layers, head, projection, in_channels));
             init_weights(model, seed);
             return PyNetwork(std::move(model));
           }),
           py::arg("n_orientations") = 8, py::arg("channels") = std::vector<int>{},
           py::arg("pool_layers") = std::vector<int>{}, py::arg("head") = "globalmax",
           py::arg("projection") = "max", py::arg("in_channels") = 3, py::arg("seed") = 0)
      .def_property_readonly("n_orientations",
                             [](const PyNetwork& n) { return n.model.config.n_orient; })
      .def_property_readonly("weight_counts",
                             [](const PyNetwork& n) {
                               WeightCount wc = count_weights(n.model);
                               std::vector<long long> out(wc.per_layer.begin(),
                                                          wc.per_layer.end());
                               out.push_back(wc.total);
                               return out;
                             })
      .def("forward", &PyNetwork::forward_batch, py::arg("batch"),
           "Inference logits for a [B,H,W,C] batch")
      .def("fit", &PyNetwork::fit, py::arg("patches"), py::arg("labels"),
           py::arg("iterations") = 100, py::arg("batch_size") = 16,
           py::arg("learning_rate") = 0.03, py::arg("momentum") = 0.9, py::arg("seed") = 0,
           py::arg("augment") = "none", py::arg("bn_refresh") = 400,
           "SGD on a logistic loss; returns per-iteration losses")
      .def("save", [](const PyNetwork& n, const std::string& path) { save_model(n.model, path); })
      .def_static("load", [](const std::string& path) {
        return PyNetwork(load_model<double>(path));
      });
}
