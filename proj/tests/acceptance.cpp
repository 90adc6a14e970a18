// Acceptance gate: one line per criterion, [PASS]/[FAIL], nonzero exit on any
// failure. Tolerances are pinned here and nowhere else.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "se2conv/datasets.hpp"
#include "se2conv/equivariance.hpp"
#include "se2conv/gcnn.hpp"
#include "se2conv/metrics.hpp"
#include "se2conv/network.hpp"
#include "se2conv/rng.hpp"
#include "se2conv/tensor_io.hpp"
#include "se2conv/train.hpp"

using namespace se2conv;

namespace {

constexpr double kOracleTolSingle = 1e-5;
constexpr double kOracleTolDouble = 1e-12;
constexpr double kGradTol = 1e-6;
constexpr double kEquivExactTol = 1e-5;
constexpr double kEquivInterpTol = 5e-2;
constexpr double kDegenerationTol = 1e-6;
constexpr double kOrderingMarginPts = 3.0;  // accuracy percentage points

int g_failures = 0;

double now_seconds() {
  using clock = std::chrono::steady_clock;
  static const clock::time_point start = clock::now();
  return std::chrono::duration<double>(clock::now() - start).count();
}

void report(int criterion, bool pass, const std::string& detail, double seconds) {
  std::printf("[%s] criterion %d: %s (%.1fs)\n", pass ? "PASS" : "FAIL", criterion,
              detail.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

template <typename T>
Tensor<T> rand_tensor(Rng& rng, std::vector<std::size_t> shape) {
  Tensor<T> t(std::move(shape));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<T>(rng.uniform(-1, 1));
  return t;
}

// --- criterion 1: weight table ------------------------------------------------

void criterion1() {
  double t0 = now_seconds();
  struct Row {
    int n;
    std::size_t per_layer[6];
    std::size_t total;
  };
  const Row rows[] = {
      {1, {1040, 5408, 5408, 21632, 1056, 17}, 34561},
      {2, {845, 7124, 7124, 17536, 1056, 17}, 33702},
      {4, {650, 8420, 8420, 13472, 1056, 17}, 32035},
      {8, {520, 10768, 10768, 10768, 1056, 17}, 33897},
      {16, {390, 12108, 12108, 8072, 1056, 17}, 33751},
  };
  bool ok = true;
  std::ostringstream detail;
  for (const Row& row : rows) {
    WeightCount wc = count_weights(build_network<float>(make_default_config(row.n)));
    if (wc.total != row.total) ok = false;
    for (int l = 0; l < 6; ++l)
      if (wc.per_layer[std::size_t(l)] != row.per_layer[l]) ok = false;
    detail << "N=" << row.n << ":" << wc.total << " ";
  }
  report(1, ok, "weight counts " + detail.str(), now_seconds() - t0);
}

// --- criterion 2: oracle equivalence -------------------------------------------

template <typename T>
std::vector<std::vector<double>> dense_planes(const Tensor<T>& kernels, const DiskMask& mask,
                                              int n) {
  std::size_t m = mask.size();
  std::size_t groups = kernels.size() / m;
  std::vector<std::vector<double>> planes(groups,
                                          std::vector<double>(std::size_t(n) * n, 0.0));
  for (std::size_t g = 0; g < groups; ++g)
    for (std::size_t s = 0; s < m; ++s)
      planes[g][std::size_t(mask.positions[s].first) * n + mask.positions[s].second] =
          double(kernels[g * m + s]);
  return planes;
}

template <typename T>
double oracle_equivalence_worst(std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0;
  for (int N : {1, 2, 4, 8}) {
    auto op = std::make_shared<const RotationOperator>(build_rotation_operator(3, N));
    Tensor<T> img = rand_tensor<T>(rng, {1, 8, 8, 2});
    Tensor<T> lk = rand_tensor<T>(rng, {2, 2, 9});
    Tape<T> tape;
    Var<T> lifted = lift_correlate(tape.input(img), tape.input(lk), op);
    Tensor<T> lift_ref =
        oracle::lift_bruteforce(img.reshaped({8, 8, 2}), dense_planes(lk, op->mask, 3), 2, 2,
                                3, N);
    Tensor<T> lift_got =
        lifted.value().reshaped({8, 8, std::size_t(N), 2});
    worst = std::max(worst, oracle::max_abs_diff(lift_got, lift_ref));

    Tensor<T> stack = rand_tensor<T>(rng, {1, 8, 8, std::size_t(N), 2});
    Tensor<T> gk = rand_tensor<T>(rng, {2, 2, std::size_t(N), 9});
    Var<T> gout = group_correlate(tape.input(stack), tape.input(gk), op);
    Tensor<T> g_ref = oracle::gconv_bruteforce(
        stack.reshaped({8, 8, std::size_t(N), 2}), dense_planes(gk, op->mask, 3), 2, 2, 3, N);
    Tensor<T> g_got = gout.value().reshaped({8, 8, std::size_t(N), 2});
    worst = std::max(worst, oracle::max_abs_diff(g_got, g_ref));
  }
  return worst;
}

void criterion2() {
  double t0 = now_seconds();
  double worst_f = oracle_equivalence_worst<float>(101);
  double worst_d = oracle_equivalence_worst<double>(102);
  bool ok = worst_f <= kOracleTolSingle && worst_d <= kOracleTolDouble;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "lift/group vs brute force, max abs err single=%.2e double=%.2e", worst_f,
                worst_d);
  report(2, ok, buf, now_seconds() - t0);
}

// --- criterion 3: gradient audit ------------------------------------------------

void criterion3() {
  double t0 = now_seconds();
  std::vector<GradientAuditEntry> entries = gradient_audit(2024);
  double worst = 0;
  bool ok = !entries.empty();
  for (const auto& e : entries) {
    worst = std::max(worst, e.max_rel_err);
    if (!e.pass) ok = false;
  }
  ChainAuditResult chain = chain_gradient_audit(make_default_config(8), 31, 3);
  worst = std::max(worst, chain.max_rel_err);
  if (chain.max_rel_err >= kGradTol) ok = false;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "%zu layer cases + full chain (%zu coords), max rel err=%.2e",
                entries.size(), chain.coords_checked, worst);
  report(3, ok, buf, now_seconds() - t0);
}

// --- criterion 4: equivariance suite --------------------------------------------

void criterion4() {
  double t0 = now_seconds();
  Rng rng(71);
  bool ok = true;
  double worst_exact = 0;

  RotationOperator op4 = build_rotation_operator(5, 4);
  TensorD img = gaussian_mixture_image<double>(24, 24, 2, 5, 1.5, 4.0, 5);
  TensorD lk = rand_tensor<double>(rng, {3, 2, 21});
  for (int k = 0; k < 4; ++k) {
    DiscreteGroupElement g{double(k % 2), double(k == 2 ? -2 : 0), k, 4};
    EquivarianceReport rep = lifting_covariance_error(img, lk, op4, g);
    worst_exact = std::max(worst_exact, rep.rel_error);
  }
  TensorD stack = gaussian_mixture_stack<double>(24, 24, 4, 2, 4, 1.5, 4.0, 7);
  TensorD gk = rand_tensor<double>(rng, {2, 2, 4, 21});
  for (int k = 0; k < 4; ++k) {
    DiscreteGroupElement g{0.0, double(k % 2), k, 4};
    EquivarianceReport rep = gconv_covariance_error(stack, gk, op4, g);
    worst_exact = std::max(worst_exact, rep.rel_error);
  }
  for (int k = 0; k < 4; ++k) {
    DiscreteGroupElement g{double(-(k % 2)), 0.0, k, 4};
    EquivarianceReport rep = projection_covariance_error(stack, g);
    worst_exact = std::max(worst_exact, rep.rel_error);
  }

  NetworkConfig cfg = make_default_config(4);
  cfg.pool_layers = {};
  Model<double> model = build_network<double>(cfg);
  init_weights(model, 21);
  TensorD chain_img = gaussian_mixture_image<double>(33, 33, 3, 5, 1.5, 4.0, 13);
  for (int k = 0; k < 4; ++k) {
    EquivarianceReport rep =
        chain_invariance_check(model, chain_img, DiscreteGroupElement{0, 0, k, 4});
    worst_exact = std::max(worst_exact, rep.rel_error);
  }
  if (worst_exact >= kEquivExactTol) ok = false;

  RotationOperator op8 = build_rotation_operator(5, 8);
  TensorD smooth = gaussian_mixture_image<double>(33, 33, 2, 4, 2.0, 3.5, 11);
  TensorD lk8 = smooth_disk_kernels<double>(rng, {2, 2, 21}, op8.mask);
  EquivarianceReport interp =
      lifting_covariance_error(smooth, lk8, op8, DiscreteGroupElement{0, 0, 1, 8});
  if (interp.rel_error >= kEquivInterpTol) ok = false;

  char buf[160];
  std::snprintf(buf, sizeof buf,
                "grid-exact worst rel err=%.2e, 45-degree interpolated rel err=%.2e",
                worst_exact, interp.rel_error);
  report(4, ok, buf, now_seconds() - t0);
}

// --- criterion 5: N=1 degeneration ----------------------------------------------

// Plain 2D CNN assembled from the basic ops only, mirroring the N=1 stack.
TensorF plain_cnn_forward(Model<float>& model, const TensorF& batch) {
  const NetworkConfig& cfg = model.config;
  Tape<float> tape;
  Var<float> x = tape.input(batch);
  for (int layer = 1; layer <= 5; ++layer) {
    const TensorF& k = model.param("layer" + std::to_string(layer) + ".kernels");
    int n = cfg.kernel_sizes[std::size_t(layer - 1)];
    DiskMask mask = build_disk_mask(n);
    std::size_t cout = k.dim(0);
    std::size_t cin = k.dim(1);  // same slot in both the lifting and group layouts
    TensorF dense({std::size_t(n), std::size_t(n), cin, cout});
    for (std::size_t oc = 0; oc < cout; ++oc)
      for (std::size_t ic = 0; ic < cin; ++ic)
        for (std::size_t s = 0; s < mask.size(); ++s) {
          auto [r, c] = mask.positions[s];
          dense[((std::size_t(r) * n + c) * cin + ic) * cout + oc] =
              k[(oc * cin + ic) * mask.size() + s];
        }
    x = correlate2d(x, tape.input(dense), Padding::SameZero, 1);
    Var<float> scale =
        tape.input(model.param("layer" + std::to_string(layer) + ".bn_scale"));
    Var<float> shift =
        tape.input(model.param("layer" + std::to_string(layer) + ".bn_shift"));
    x = batch_norm(x, scale, shift, &model.bn_states[std::size_t(layer - 1)],
                   float(cfg.bn_epsilon), BnMode::Inference, false);
    x = relu(x);
    for (int p : cfg.pool_layers)
      if (p == layer) x = max_pool2d(x, 2);
  }
  x = correlate2d(x, tape.input(model.param("layer6.kernels")), Padding::SameZero, 1);
  x = add_channel_bias(x, tape.input(model.param("layer6.bias")));
  for (int p : cfg.pool_layers)
    if (p == 6) x = max_pool2d(x, 2);
  if (cfg.head == NetworkConfig::Head::GlobalMax) x = global_spatial_max(x);
  return x.value();
}

void criterion5() {
  double t0 = now_seconds();
  NetworkConfig cfg = make_default_config(1);
  cfg.pool_layers = {1, 2, 3};
  Model<float> model = build_network<float>(cfg);
  init_weights(model, 55);
  Rng rng(56);
  TensorF batch = rand_tensor<float>(rng, {2, 32, 32, 3});

  Tape<float> tape;
  TensorF se2_logits = forward(model, tape, batch, BnMode::Inference, false).logits.value();
  TensorF plain_logits = plain_cnn_forward(model, batch);
  double worst = oracle::max_abs_diff(se2_logits, plain_logits);
  char buf[120];
  std::snprintf(buf, sizeof buf, "single-orientation vs plain 2D CNN, max abs diff=%.2e",
                worst);
  report(5, worst <= kDegenerationTol, buf, now_seconds() - t0);
}

// --- criterion 6: behavioural ordering at desk scale -----------------------------

template <typename T>
LabeledPatchSet<T> take_range(const LabeledPatchSet<T>& ds, std::size_t begin,
                              std::size_t count) {
  LabeledPatchSet<T> out;
  out.generator = ds.generator;
  out.seed = ds.seed;
  std::size_t item = ds.patches.size() / ds.patches.dim(0);
  std::vector<std::size_t> pshape = ds.patches.shape();
  pshape[0] = count;
  out.patches = Tensor<T>(pshape);
  for (std::size_t i = 0; i < count * item; ++i)
    out.patches[i] = ds.patches[begin * item + i];
  out.labels = Tensor<T>({count});
  for (std::size_t i = 0; i < count; ++i) out.labels[i] = ds.labels[begin + i];
  return out;
}

double run_variant(int n_orient, AugmentMode augment, std::uint64_t seed,
                   const LabeledPatchSet<float>& trainset,
                   const LabeledPatchSet<float>& testset) {
  NetworkConfig cfg = make_default_config(n_orient);
  cfg.pool_layers = {1, 2, 3};
  Model<float> model = build_network<float>(cfg);
  init_weights(model, seed);
  TrainSettings s;
  s.iterations = 560;
  s.batch_size = 25;
  s.learning_rate = 0.03;
  s.momentum = 0.9;
  s.seed = seed;
  s.augment = augment;
  s.log_every = 1000000;  // quiet
  train(model, trainset, s, nullptr);
  return accuracy(model, testset, AugmentMode::None);
}

void criterion6() {
  double t0 = now_seconds();
  auto full = synth_rotated_patterns<float>(2500, 7);
  auto trainset = take_range(full, 0, 2000);
  auto testset = take_range(full, 2000, 500);

  double acc_g = 0, acc_aug = 0, acc_base = 0;
  const std::uint64_t seeds[3] = {1, 2, 3};
  for (std::uint64_t seed : seeds) {
    double a_g = run_variant(8, AugmentMode::None, seed, trainset, testset);
    double a_aug = run_variant(1, AugmentMode::TransposeRot90, seed, trainset, testset);
    double a_base = run_variant(1, AugmentMode::None, seed, trainset, testset);
    std::printf("  seed %llu: eight-orientation %.3f, augmented baseline %.3f, "
                "plain baseline %.3f (%.0fs)\n",
                static_cast<unsigned long long>(seed), a_g, a_aug, a_base, now_seconds() - t0);
    std::fflush(stdout);
    acc_g += a_g / 3;
    acc_aug += a_aug / 3;
    acc_base += a_base / 3;
  }
  bool ok = acc_g >= acc_aug && (acc_aug - acc_base) * 100.0 >= kOrderingMarginPts &&
            (acc_g - acc_base) * 100.0 >= kOrderingMarginPts;
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "mean test accuracy: eight-orientation no-aug=%.3f >= rot90-augmented "
                "baseline=%.3f, plain baseline=%.3f trails by >= 3 points",
                acc_g, acc_aug, acc_base);
  report(6, ok, buf, now_seconds() - t0);
}

// --- criterion 7: metric units ----------------------------------------------------

void criterion7() {
  double t0 = now_seconds();
  bool ok = true;
  if (std::abs(f1_score(2, 1, 1) - 2.0 / 3.0) > 1e-15) ok = false;
  std::vector<double> s4{0.9, 0.4, 0.5, 0.1};
  std::vector<int> l4{1, 1, 0, 0};
  if (std::abs(roc_auc(s4, l4) - 0.75) > 1e-15) ok = false;
  std::vector<double> flat{0.2, 0.2, 0.2, 0.2};
  if (std::abs(roc_auc(flat, l4) - 0.5) > 1e-15) ok = false;
  if (std::abs(rand_index({1, 1, 2, 2}, {1, 1, 1, 2}) - 0.5) > 1e-15) ok = false;
  if (rand_index({1, 1}, {1, 2}) != 0.0) ok = false;

  Rng rng(77);
  double worst = 0;
  int done = 0;
  while (done < 200) {
    std::size_t n = 5 + rng.uniform_index(60);
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    bool has0 = false, has1 = false;
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = std::round(rng.uniform(0, 1) * 16) / 16.0;
      labels[i] = rng.uniform() < 0.5 ? 0 : 1;
      (labels[i] ? has1 : has0) = true;
    }
    if (!has0 || !has1) continue;
    ++done;
    worst = std::max(worst,
                     std::abs(roc_auc(scores, labels) - oracle::auc_pairwise(scores, labels)));
  }
  if (worst > 1e-12) ok = false;
  char buf[120];
  std::snprintf(buf, sizeof buf,
                "micro-examples exact, AUC vs pairwise oracle on 200 sets, max diff=%.1e",
                worst);
  report(7, ok, buf, now_seconds() - t0);
}

// --- criterion 8: determinism -----------------------------------------------------

void criterion8() {
  double t0 = now_seconds();
  auto run_once = [&](const std::string& path, std::string& log_out) {
    NetworkConfig cfg = make_default_config(2);
    cfg.channels = {4, 4, 4, 4, 8, 1};
    cfg.kernel_sizes = {3, 3, 3, 3, 1, 1};
    cfg.pool_layers = {1, 2, 3};
    Model<float> model = build_network<float>(cfg);
    init_weights(model, 99);
    auto ds = synth_rotated_patterns<float>(64, 13);
    TrainSettings s;
    s.iterations = 30;
    s.batch_size = 8;
    s.seed = 5;
    s.log_every = 10;
    std::ostringstream log;
    train(model, ds, s, &log);
    save_model(model, path);
    log_out = log.str();
  };
  std::string log1, log2;
  run_once("tmp_acc_run1.se2m", log1);
  run_once("tmp_acc_run2.se2m", log2);
  std::string b1 = read_file_bytes("tmp_acc_run1.se2m");
  std::string b2 = read_file_bytes("tmp_acc_run2.se2m");
  bool ok = b1 == b2 && log1 == log2 && !b1.empty() && !log1.empty();
  std::remove("tmp_acc_run1.se2m");
  std::remove("tmp_acc_run2.se2m");
  char buf[120];
  std::snprintf(buf, sizeof buf,
                "same-seed reruns: %zu model bytes and %zu log bytes identical", b1.size(),
                log1.size());
  report(8, ok, buf, now_seconds() - t0);
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  if (g_failures) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all acceptance criteria passed\n");
  return 0;
}
