#include "se2conv/equivariance.hpp"

#include <cmath>
#include <functional>

#include "se2conv/gcnn.hpp"
#include "se2conv/rng.hpp"

namespace se2conv {

namespace {

bool is_grid_exact(const DiscreteGroupElement& g) {
  bool quarter = (4 * g.k) % g.n == 0;
  bool integer_t = g.x == std::floor(g.x) && g.y == std::floor(g.y);
  return quarter && integer_t;
}

int translation_margin(const DiscreteGroupElement& g) {
  return static_cast<int>(std::ceil(std::max(std::abs(g.x), std::abs(g.y))));
}

// Interior L2 of (a - b) and of b, skipping `margin` pixels on each spatial
// border. Spatial axes are 0,1; trailing axes are compared elementwise.
template <typename T>
void interior_l2(const Tensor<T>& a, const Tensor<T>& b, int margin, double& abs_err,
                 double& rel_err) {
  if (a.shape() != b.shape())
    throw std::invalid_argument("interior_l2: shape mismatch " + shape_str(a.shape()) + " vs " +
                                shape_str(b.shape()));
  std::size_t h = a.dim(0), w = a.dim(1);
  std::size_t inner = a.size() / (h * w);
  if (2 * std::size_t(margin) >= h || 2 * std::size_t(margin) >= w)
    throw std::invalid_argument("interior_l2: margin leaves no interior");
  double diff2 = 0, ref2 = 0;
  for (std::size_t r = std::size_t(margin); r < h - std::size_t(margin); ++r)
    for (std::size_t c = std::size_t(margin); c < w - std::size_t(margin); ++c)
      for (std::size_t k = 0; k < inner; ++k) {
        double av = a[(r * w + c) * inner + k];
        double bv = b[(r * w + c) * inner + k];
        diff2 += (av - bv) * (av - bv);
        ref2 += bv * bv;
      }
  abs_err = std::sqrt(diff2);
  rel_err = ref2 > 0 ? abs_err / std::sqrt(ref2) : abs_err;
}

// Single-image lift: [H,W,C] -> [H,W,N,Cout], no gradient bookkeeping kept.
template <typename T>
Tensor<T> lift_once(const Tensor<T>& image, const Tensor<T>& kernels,
                    std::shared_ptr<const RotationOperator> op) {
  Tape<T> tape;
  Var<T> x = tape.input(image.reshaped({1, image.dim(0), image.dim(1), image.dim(2)}));
  Var<T> k = tape.input(kernels);
  Tensor<T> out = lift_correlate(x, k, op).value();
  return out.reshaped({out.dim(1), out.dim(2), out.dim(3), out.dim(4)});
}

template <typename T>
Tensor<T> gconv_once(const Tensor<T>& stack, const Tensor<T>& kernels,
                     std::shared_ptr<const RotationOperator> op) {
  Tape<T> tape;
  Var<T> x = tape.input(
      stack.reshaped({1, stack.dim(0), stack.dim(1), stack.dim(2), stack.dim(3)}));
  Var<T> k = tape.input(kernels);
  Tensor<T> out = group_correlate(x, k, op).value();
  return out.reshaped({out.dim(1), out.dim(2), out.dim(3), out.dim(4)});
}

template <typename T>
Tensor<T> project_once(const Tensor<T>& stack) {
  Tape<T> tape;
  Var<T> x = tape.input(
      stack.reshaped({1, stack.dim(0), stack.dim(1), stack.dim(2), stack.dim(3)}));
  Tensor<T> out = project_max_orientations(x).value();
  return out.reshaped({out.dim(1), out.dim(2), out.dim(3)});
}

GroupElement planar_of(const DiscreteGroupElement& g) {
  OrientationSampling samp{g.n};
  return GroupElement{g.x, g.y, samp.theta(samp.wrap(g.k))};
}

}  // namespace

template <typename T>
EquivarianceReport lifting_covariance_error(const Tensor<T>& image, const Tensor<T>& kernels,
                                            const RotationOperator& op,
                                            const DiscreteGroupElement& g) {
  if (g.n != op.n_orient)
    throw std::invalid_argument("lifting_covariance_error: element sampling differs from operator");
  auto shared = std::make_shared<const RotationOperator>(op);
  Tensor<T> lhs = lift_once(apply_roto_translation(image, planar_of(g)), kernels, shared);
  Tensor<T> rhs = apply_shift_twist(lift_once(image, kernels, shared), g);
  EquivarianceReport rep;
  rep.name = "lifting";
  rep.g = g;
  rep.margin = op.mask.n + translation_margin(g);
  rep.grid_exact = is_grid_exact(g);
  interior_l2(lhs, rhs, rep.margin, rep.abs_error, rep.rel_error);
  return rep;
}

template <typename T>
EquivarianceReport gconv_covariance_error(const Tensor<T>& stack, const Tensor<T>& kernels,
                                          const RotationOperator& op,
                                          const DiscreteGroupElement& g) {
  if (g.n != op.n_orient)
    throw std::invalid_argument("gconv_covariance_error: element sampling differs from operator");
  auto shared = std::make_shared<const RotationOperator>(op);
  Tensor<T> lhs = gconv_once(apply_shift_twist(stack, g), kernels, shared);
  Tensor<T> rhs = apply_shift_twist(gconv_once(stack, kernels, shared), g);
  EquivarianceReport rep;
  rep.name = "group_correlation";
  rep.g = g;
  rep.margin = op.mask.n + translation_margin(g);
  rep.grid_exact = is_grid_exact(g);
  interior_l2(lhs, rhs, rep.margin, rep.abs_error, rep.rel_error);
  return rep;
}

template <typename T>
EquivarianceReport projection_covariance_error(const Tensor<T>& stack,
                                               const DiscreteGroupElement& g) {
  if (stack.rank() != 4 || stack.dim(2) != std::size_t(g.n))
    throw std::invalid_argument("projection_covariance_error: stack/element mismatch");
  Tensor<T> lhs = project_once(apply_shift_twist(stack, g));
  Tensor<T> rhs = apply_roto_translation(project_once(stack), planar_of(g));
  EquivarianceReport rep;
  rep.name = "projection";
  rep.g = g;
  rep.margin = 1 + translation_margin(g);
  rep.grid_exact = is_grid_exact(g);
  interior_l2(lhs, rhs, rep.margin, rep.abs_error, rep.rel_error);
  return rep;
}

template <typename T>
EquivarianceReport chain_invariance_check(Model<T>& model, const Tensor<T>& image,
                                          const DiscreteGroupElement& g) {
  if (image.rank() != 3)
    throw std::invalid_argument("chain_invariance_check: image must be [H,W,C]");
  if (g.n != model.config.n_orient)
    throw std::invalid_argument("chain_invariance_check: element sampling differs from model");
  int pools = static_cast<int>(model.config.pool_layers.size());
  int factor = 1 << pools;

  Tensor<T> moved = apply_roto_translation(image, planar_of(g));
  auto run = [&](const Tensor<T>& img) {
    Tape<T> tape;
    auto fp = forward(model, tape, img.reshaped({1, img.dim(0), img.dim(1), img.dim(2)}),
                      BnMode::Inference, false);
    return fp.logits.value();
  };
  Tensor<T> z_moved = run(moved);
  Tensor<T> z_orig = run(image);

  EquivarianceReport rep;
  rep.name = "chain";
  rep.g = g;
  rep.grid_exact = is_grid_exact(g);

  if (model.config.head == NetworkConfig::Head::GlobalMax) {
    double diff2 = 0, ref2 = 0;
    for (std::size_t i = 0; i < z_orig.size(); ++i) {
      double d = double(z_moved[i]) - double(z_orig[i]);
      diff2 += d * d;
      ref2 += double(z_orig[i]) * double(z_orig[i]);
    }
    rep.abs_error = std::sqrt(diff2);
    rep.rel_error = ref2 > 0 ? rep.abs_error / std::sqrt(ref2) : rep.abs_error;
    return rep;
  }

  // Per-pixel head: logits covary; transform the reference map.
  if (std::fmod(g.x, double(factor)) != 0 || std::fmod(g.y, double(factor)) != 0)
    throw std::invalid_argument(
        "chain_invariance_check: translation must be divisible by the pooling factor " +
        std::to_string(factor));
  Tensor<T> lhs = z_moved.reshaped({z_moved.dim(1), z_moved.dim(2), z_moved.dim(3)});
  Tensor<T> map = z_orig.reshaped({z_orig.dim(1), z_orig.dim(2), z_orig.dim(3)});
  GroupElement out_motion{g.x / factor, g.y / factor, planar_of(g).theta};
  Tensor<T> rhs = apply_roto_translation(map, out_motion);
  int radius = 0;
  for (int l = 0; l < 6; ++l) radius += model.config.kernel_sizes[std::size_t(l)] / 2;
  rep.margin = (radius + translation_margin(g)) / factor + 1;
  interior_l2(lhs, rhs, rep.margin, rep.abs_error, rep.rel_error);
  return rep;
}

template <typename T>
Tensor<T> gaussian_mixture_image(int h, int w, int c, int blobs, double sigma_lo,
                                 double sigma_hi, std::uint64_t seed) {
  Rng rng(seed);
  Tensor<T> img({std::size_t(h), std::size_t(w), std::size_t(c)});
  for (int b = 0; b < blobs; ++b) {
    double cr = rng.uniform(0.2 * h, 0.8 * h);
    double cc = rng.uniform(0.2 * w, 0.8 * w);
    double sigma = rng.uniform(sigma_lo, sigma_hi);
    std::vector<double> amp(static_cast<std::size_t>(c));
    for (double& a : amp) a = rng.uniform(0.3, 1.0);
    for (int r = 0; r < h; ++r)
      for (int col = 0; col < w; ++col) {
        double d2 = (r - cr) * (r - cr) + (col - cc) * (col - cc);
        double v = std::exp(-d2 / (2 * sigma * sigma));
        for (int k = 0; k < c; ++k)
          img[(std::size_t(r) * w + col) * c + std::size_t(k)] +=
              static_cast<T>(amp[std::size_t(k)] * v);
      }
  }
  return img;
}

template <typename T>
Tensor<T> gaussian_mixture_stack(int h, int w, int n, int c, int blobs, double sigma_lo,
                                 double sigma_hi, std::uint64_t seed) {
  Tensor<T> stack({std::size_t(h), std::size_t(w), std::size_t(n), std::size_t(c)});
  for (int j = 0; j < n; ++j) {
    Tensor<T> slice = gaussian_mixture_image<T>(h, w, c, blobs, sigma_lo, sigma_hi,
                                                seed + std::uint64_t(j) * 1000003ULL);
    for (std::size_t r = 0; r < std::size_t(h); ++r)
      for (std::size_t col = 0; col < std::size_t(w); ++col)
        for (std::size_t k = 0; k < std::size_t(c); ++k)
          stack[((r * w + col) * n + std::size_t(j)) * c + k] =
              slice[(r * w + col) * c + k];
  }
  return stack;
}

template <typename T>
Tensor<T> smooth_disk_kernels(Rng& rng, std::vector<std::size_t> shape, const DiskMask& mask) {
  Tensor<T> t(std::move(shape));
  std::size_t m = mask.size();
  if (m == 0 || t.size() % m != 0)
    throw std::invalid_argument("smooth_disk_kernels: shape does not end in the mask size");
  std::size_t groups = t.size() / m;
  double ctr = (mask.n - 1) / 2.0;
  double edge = mask.n / 2.0;
  for (std::size_t g = 0; g < groups; ++g) {
    double amp[2], cr[2], cc[2], sg[2];
    for (int b = 0; b < 2; ++b) {
      amp[b] = rng.uniform(-1.0, 1.0);
      cr[b] = rng.uniform(-1.0, 1.0);
      cc[b] = rng.uniform(-1.0, 1.0);
      sg[b] = rng.uniform(2.2, 3.2);
    }
    for (std::size_t s = 0; s < m; ++s) {
      double dr = mask.positions[s].first - ctr, dc = mask.positions[s].second - ctr;
      double v = 0;
      for (int b = 0; b < 2; ++b) {
        double q = (dr - cr[b]) * (dr - cr[b]) + (dc - cc[b]) * (dc - cc[b]);
        v += amp[b] * std::exp(-q / (2 * sg[b] * sg[b]));
      }
      double rho2 = (dr * dr + dc * dc) / (edge * edge);
      double w = rho2 >= 1.0 ? 0.0 : (1.0 - rho2) * (1.0 - rho2);
      t[g * m + s] = static_cast<T>(v * w);
    }
  }
  return t;
}

// --- gradient audits ----------------------------------------------------------

namespace {

using DTensor = Tensor<double>;
using DVar = Var<double>;
using Builder = std::function<DVar(Tape<double>&, std::vector<DVar>&)>;

double run_audit_case(const std::vector<DTensor>& leaves, const Builder& build) {
  Tape<double> tape;
  std::vector<DVar> vars;
  vars.reserve(leaves.size());
  for (const auto& t : leaves) vars.push_back(tape.parameter(t));
  DVar loss = build(tape, vars);
  tape.backward(loss.id);

  double max_rel = 0;
  for (std::size_t li = 0; li < leaves.size(); ++li) {
    DTensor fd = finite_difference_gradient<double>(
        [&](const DTensor& x) {
          Tape<double> t2;
          std::vector<DVar> v2;
          for (std::size_t j = 0; j < leaves.size(); ++j)
            v2.push_back(t2.parameter(j == li ? x : leaves[j]));
          return build(t2, v2).value()[0];
        },
        leaves[li], 1e-5);
    const DTensor& an = tape.grad(vars[li].id);
    for (std::size_t i = 0; i < fd.size(); ++i) {
      double scale = std::max(std::abs(an[i]), std::abs(fd[i]));
      if (scale <= 1e-8) continue;
      max_rel = std::max(max_rel, std::abs(an[i] - fd[i]) / scale);
    }
  }
  return max_rel;
}

DTensor random_tensor(Rng& rng, std::vector<std::size_t> shape, double lo = -1.0,
                      double hi = 1.0) {
  DTensor t(std::move(shape));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(lo, hi);
  return t;
}

// Uniform in [-1,1] but bounded away from zero, for kink-free ReLU checks.
DTensor random_tensor_off_zero(Rng& rng, std::vector<std::size_t> shape) {
  DTensor t = random_tensor(rng, std::move(shape));
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (std::abs(t[i]) < 0.01) t[i] = t[i] < 0 ? t[i] - 0.05 : t[i] + 0.05;
  }
  return t;
}

}  // namespace

std::vector<GradientAuditEntry> gradient_audit(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<GradientAuditEntry> entries;
  auto check = [&](const std::string& name, const std::vector<DTensor>& leaves,
                   const Builder& build) {
    GradientAuditEntry e;
    e.name = name;
    e.max_rel_err = run_audit_case(leaves, build);
    e.pass = e.max_rel_err < 1e-6;
    entries.push_back(std::move(e));
  };
  auto head = [&](std::vector<std::size_t> shape) { return random_tensor(rng, std::move(shape)); };

  {
    DTensor w = head({2, 5, 6, 3});
    check("correlate2d_same", {random_tensor(rng, {2, 5, 6, 2}), random_tensor(rng, {3, 3, 2, 3})},
          [w](Tape<double>&, std::vector<DVar>& v) {
            return dot_const(correlate2d(v[0], v[1], Padding::SameZero, 1), w);
          });
  }
  {
    DTensor w = head({2, 3, 3, 2});
    check("correlate2d_valid_stride2",
          {random_tensor(rng, {2, 7, 7, 2}), random_tensor(rng, {3, 3, 2, 2})},
          [w](Tape<double>&, std::vector<DVar>& v) {
            return dot_const(correlate2d(v[0], v[1], Padding::Valid, 2), w);
          });
  }
  {
    DTensor w = head({2, 4, 4, 3});
    check("relu", {random_tensor_off_zero(rng, {2, 4, 4, 3})},
          [w](Tape<double>&, std::vector<DVar>& v) { return dot_const(relu(v[0]), w); });
  }
  {
    DTensor w = head({2, 2, 2, 3});
    check("max_pool2d", {random_tensor(rng, {2, 4, 4, 3})},
          [w](Tape<double>&, std::vector<DVar>& v) { return dot_const(max_pool2d(v[0], 2), w); });
  }
  {
    DTensor w = head({1, 2, 2, 2, 2});
    check("max_pool2d_stack", {random_tensor(rng, {1, 4, 4, 2, 2})},
          [w](Tape<double>&, std::vector<DVar>& v) { return dot_const(max_pool2d(v[0], 2), w); });
  }
  {
    DTensor w = head({2, 4});
    check("global_spatial_max", {random_tensor(rng, {2, 5, 5, 4})},
          [w](Tape<double>&, std::vector<DVar>& v) {
            return dot_const(global_spatial_max(v[0]), w);
          });
  }
  {
    DTensor w = head({2, 3, 3, 4});
    check("add_channel_bias", {random_tensor(rng, {2, 3, 3, 4}), random_tensor(rng, {4})},
          [w](Tape<double>&, std::vector<DVar>& v) {
            return dot_const(add_channel_bias(v[0], v[1]), w);
          });
  }
  {
    DTensor w = head({2, 4, 4, 3});
    check("batch_norm_train",
          {random_tensor(rng, {2, 4, 4, 3}), random_tensor(rng, {3}, 0.5, 1.5),
           random_tensor(rng, {3})},
          [w](Tape<double>&, std::vector<DVar>& v) {
            return dot_const(
                batch_norm<double>(v[0], v[1], v[2], nullptr, 1e-5, BnMode::Train, false), w);
          });
  }
  {
    auto state = std::make_shared<BatchNormState<double>>();
    state->running_mean = random_tensor(rng, {3});
    state->running_var = random_tensor(rng, {3}, 0.2, 1.5);
    DTensor w = head({2, 4, 4, 3});
    check("batch_norm_inference",
          {random_tensor(rng, {2, 4, 4, 3}), random_tensor(rng, {3}, 0.5, 1.5),
           random_tensor(rng, {3})},
          [w, state](Tape<double>&, std::vector<DVar>& v) {
            return dot_const(
                batch_norm(v[0], v[1], v[2], state.get(), 1e-5, BnMode::Inference, false), w);
          });
  }
  {
    auto op = std::make_shared<const RotationOperator>(build_rotation_operator(3, 4));
    DTensor w = head({3, 3, 4, 2, 2});
    check("rotate_kernel_stack", {random_tensor(rng, {2, 2, 9})},
          [w, op](Tape<double>&, std::vector<DVar>& v) {
            return dot_const(rotate_kernel_stack(v[0], op), w);
          });
  }
  {
    auto op = std::make_shared<const RotationOperator>(build_rotation_operator(3, 4));
    DTensor w = head({1, 6, 6, 4, 3});
    check("lift_correlate", {random_tensor(rng, {1, 6, 6, 2}), random_tensor(rng, {3, 2, 9})},
          [w, op](Tape<double>&, std::vector<DVar>& v) {
            return dot_const(lift_correlate(v[0], v[1], op), w);
          });
  }
  {
    auto op = std::make_shared<const RotationOperator>(build_rotation_operator(3, 4));
    DTensor w = head({1, 5, 5, 4, 2});
    check("group_correlate",
          {random_tensor(rng, {1, 5, 5, 4, 2}), random_tensor(rng, {2, 2, 4, 9})},
          [w, op](Tape<double>&, std::vector<DVar>& v) {
            return dot_const(group_correlate(v[0], v[1], op), w);
          });
  }
  {
    auto op = std::make_shared<const RotationOperator>(build_rotation_operator(1, 4));
    DTensor w = head({1, 3, 3, 4, 2});
    check("group_correlate_1x1",
          {random_tensor(rng, {1, 3, 3, 4, 3}), random_tensor(rng, {2, 3, 4, 1})},
          [w, op](Tape<double>&, std::vector<DVar>& v) {
            return dot_const(group_correlate(v[0], v[1], op), w);
          });
  }
  {
    DTensor w = head({1, 4, 4, 3});
    check("project_max", {random_tensor(rng, {1, 4, 4, 4, 3})},
          [w](Tape<double>&, std::vector<DVar>& v) {
            return dot_const(project_max_orientations(v[0]), w);
          });
  }
  {
    DTensor w = head({1, 4, 4, 3});
    check("project_mean", {random_tensor(rng, {1, 4, 4, 4, 3})},
          [w](Tape<double>&, std::vector<DVar>& v) {
            return dot_const(project_mean_orientations(v[0]), w);
          });
  }
  {
    DTensor labels({6, 1});
    for (std::size_t i = 0; i < labels.size(); ++i)
      labels[i] = rng.uniform() < 0.5 ? 0.0 : 1.0;
    check("logistic_loss", {random_tensor(rng, {6, 1})},
          [labels](Tape<double>&, std::vector<DVar>& v) {
            return logistic_loss(v[0], labels);
          });
  }
  {
    DTensor w = head({12});
    check("elementwise_chain",
          {random_tensor(rng, {3, 4}), random_tensor(rng, {3, 4}),
           random_tensor_off_zero(rng, {3, 4})},
          [w](Tape<double>&, std::vector<DVar>& v) {
            DVar y = mul(add(v[0], v[1]), relu(v[2]));
            DVar z = reshape(scale(y, 1.7), {12});
            return add(dot_const(z, w), mean(mul(z, z)));
          });
  }
  return entries;
}

ChainAuditResult chain_gradient_audit(const NetworkConfig& cfg, std::uint64_t seed,
                                      int coords_per_tensor) {
  Model<double> model = build_network<double>(cfg);
  init_weights(model, seed);
  Rng rng(seed ^ 0xABCDEF123456ULL);

  int side = 8;
  Tensor<double> batch({2, std::size_t(side), std::size_t(side), std::size_t(cfg.in_channels)});
  for (std::size_t i = 0; i < batch.size(); ++i) batch[i] = rng.uniform(-1.0, 1.0);
  std::size_t logit_cols = std::size_t(cfg.channels[5]);
  Tensor<double> labels({2, logit_cols});
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = rng.uniform() < 0.5 ? 0.0 : 1.0;

  // Analytic gradients once.
  Tape<double> tape;
  auto fp = forward(model, tape, batch, BnMode::Train, false);
  Var<double> loss = logistic_loss(fp.logits, labels);
  tape.backward(loss.id);

  ChainAuditResult result;
  const double eps = 1e-5;
  for (std::size_t p = 0; p < model.params.size(); ++p) {
    Tensor<double>& param = model.params[p].second;
    const Tensor<double>& analytic = tape.grad(fp.params[p].id);
    int probes = std::min<int>(coords_per_tensor, static_cast<int>(param.size()));
    for (int q = 0; q < probes; ++q) {
      std::size_t coord = rng.uniform_index(param.size());
      double orig = param[coord];
      param[coord] = orig + eps;
      double hi = [&] {
        Tape<double> t2;
        auto f2 = forward(model, t2, batch, BnMode::Train, false);
        return logistic_loss(f2.logits, labels).value()[0];
      }();
      param[coord] = orig - eps;
      double lo = [&] {
        Tape<double> t2;
        auto f2 = forward(model, t2, batch, BnMode::Train, false);
        return logistic_loss(f2.logits, labels).value()[0];
      }();
      param[coord] = orig;
      double fd = (hi - lo) / (2 * eps);
      double an = analytic[coord];
      double scl = std::max(std::abs(an), std::abs(fd));
      if (scl > 1e-8)
        result.max_rel_err = std::max(result.max_rel_err, std::abs(an - fd) / scl);
      ++result.coords_checked;
    }
  }
  return result;
}

#define SE2CONV_INSTANTIATE(T)                                                              \
  template EquivarianceReport lifting_covariance_error<T>(                                  \
      const Tensor<T>&, const Tensor<T>&, const RotationOperator&,                          \
      const DiscreteGroupElement&);                                                         \
  template EquivarianceReport gconv_covariance_error<T>(const Tensor<T>&, const Tensor<T>&, \
                                                        const RotationOperator&,            \
                                                        const DiscreteGroupElement&);       \
  template EquivarianceReport projection_covariance_error<T>(const Tensor<T>&,              \
                                                             const DiscreteGroupElement&);  \
  template EquivarianceReport chain_invariance_check<T>(Model<T>&, const Tensor<T>&,        \
                                                        const DiscreteGroupElement&);       \
  template Tensor<T> gaussian_mixture_image<T>(int, int, int, int, double, double,          \
                                               std::uint64_t);                              \
  template Tensor<T> gaussian_mixture_stack<T>(int, int, int, int, int, double, double,     \
                                               std::uint64_t);                              \
  template Tensor<T> smooth_disk_kernels<T>(Rng&, std::vector<std::size_t>, const DiskMask&);

SE2CONV_INSTANTIATE(float)
SE2CONV_INSTANTIATE(double)
#undef SE2CONV_INSTANTIATE

}  // namespace se2conv
