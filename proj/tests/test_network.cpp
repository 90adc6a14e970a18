#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "se2conv/network.hpp"
#include "se2conv/tensor_io.hpp"

using namespace se2conv;

TEST_CASE("weight counts reproduce the reference table exactly") {
  struct Row {
    int n;
    std::array<int, 6> ch;
    std::size_t total;
  };
  const Row rows[] = {
      {1, {16, 16, 16, 64, 16, 1}, 34561}, {2, {13, 13, 13, 32, 16, 1}, 33702},
      {4, {10, 10, 10, 16, 16, 1}, 32035}, {8, {8, 8, 8, 8, 16, 1}, 33897},
      {16, {6, 6, 6, 4, 16, 1}, 33751},
  };
  for (const Row& row : rows) {
    NetworkConfig cfg = make_default_config(row.n);
    for (int l = 0; l < 6; ++l) CHECK(cfg.channels[std::size_t(l)] == row.ch[std::size_t(l)]);
    WeightCount wc = count_weights(build_network<float>(cfg));
    CHECK(wc.total == row.total);
    // Fourth-layer width halves as orientations double (product stays 64) and
    // the penultimate width is pinned at 16.
    CHECK(std::size_t(row.ch[3]) * std::size_t(row.n) == 64);
    CHECK(row.ch[4] == 16);
  }
  // Spot-check full per-layer breakdowns at the two extremes of the table.
  {
    WeightCount wc = count_weights(build_network<float>(make_default_config(1)));
    const std::size_t expect[6] = {1040, 5408, 5408, 21632, 1056, 17};
    for (int l = 0; l < 6; ++l) CHECK(wc.per_layer[std::size_t(l)] == expect[l]);
  }
  {
    WeightCount wc = count_weights(build_network<float>(make_default_config(8)));
    const std::size_t expect[6] = {520, 10768, 10768, 10768, 1056, 17};
    for (int l = 0; l < 6; ++l) CHECK(wc.per_layer[std::size_t(l)] == expect[l]);
  }
}

TEST_CASE("per-layer counts for the remaining table rows") {
  // Each layer's count is kernels plus its normalization (or bias) vector,
  // recomputed here from the raw tensor shapes rather than copied.
  {
    WeightCount wc = count_weights(build_network<float>(make_default_config(2)));
    std::size_t total = 0;
    for (std::size_t v : wc.per_layer) total += v;
    CHECK(total == wc.total);
    CHECK(wc.total == 33702);
    CHECK(wc.per_layer[0] == std::size_t(13 * 3 * 21 + 2 * 13));
    CHECK(wc.per_layer[1] == std::size_t(13 * 13 * 2 * 21 + 2 * 13));
    CHECK(wc.per_layer[3] == std::size_t(32 * 13 * 2 * 21 + 2 * 32));
    CHECK(wc.per_layer[4] == std::size_t(16 * 32 * 2 * 1 + 2 * 16));
  }
  {
    WeightCount wc = count_weights(build_network<float>(make_default_config(4)));
    CHECK(wc.total == 32035);
    CHECK(wc.per_layer[0] == std::size_t(10 * 3 * 21 + 2 * 10));
    CHECK(wc.per_layer[1] == std::size_t(10 * 10 * 4 * 21 + 2 * 10));
    CHECK(wc.per_layer[5] == 17);
  }
  {
    WeightCount wc = count_weights(build_network<float>(make_default_config(16)));
    CHECK(wc.total == 33751);
    CHECK(wc.per_layer[0] == std::size_t(6 * 3 * 21 + 2 * 6));
    CHECK(wc.per_layer[3] == std::size_t(4 * 6 * 16 * 21 + 2 * 4));
  }
}

TEST_CASE("configs outside the table still build") {
  NetworkConfig cfg = make_default_config(3);
  CHECK(cfg.n_orient == 3);
  Model<float> m = build_network<float>(cfg);
  // 6 kernel tensors + 5 scale/shift pairs + 1 output bias.
  CHECK(m.params.size() == 17);
  CHECK(m.param("layer2.kernels").dim(2) == 3);
}

TEST_CASE("build validation rejects malformed configs") {
  NetworkConfig cfg = make_default_config(4);
  cfg.n_orient = 0;
  CHECK_THROWS(build_network<float>(cfg));
  cfg = make_default_config(4);
  cfg.kernel_sizes[0] = 4;
  CHECK_THROWS(build_network<float>(cfg));
  cfg = make_default_config(4);
  cfg.pool_layers = {7};
  CHECK_THROWS(build_network<float>(cfg));
  cfg = make_default_config(4);
  cfg.channels[2] = 0;
  CHECK_THROWS(build_network<float>(cfg));
  cfg = make_default_config(4);
  cfg.bn_epsilon = 0;
  CHECK_THROWS(build_network<float>(cfg));
}

TEST_CASE("parameter shapes follow the layer layout") {
  NetworkConfig cfg = make_default_config(8);
  Model<float> m = build_network<float>(cfg);
  CHECK(m.param("layer1.kernels").shape() == std::vector<std::size_t>{8, 3, 21});
  CHECK(m.param("layer2.kernels").shape() == std::vector<std::size_t>{8, 8, 8, 21});
  CHECK(m.param("layer5.kernels").shape() == std::vector<std::size_t>{16, 8, 8, 1});
  CHECK(m.param("layer6.kernels").shape() == std::vector<std::size_t>{1, 1, 16, 1});
  CHECK(m.param("layer6.bias").shape() == std::vector<std::size_t>{1});
  CHECK(m.param("layer3.bn_scale").shape() == std::vector<std::size_t>{8});
  CHECK_THROWS(m.param("layer7.kernels"));
}

TEST_CASE("initialization is seed-deterministic with the documented fan-in variance") {
  NetworkConfig cfg = make_default_config(8);
  Model<double> a = build_network<double>(cfg);
  Model<double> b = build_network<double>(cfg);
  init_weights(a, 123);
  init_weights(b, 123);
  for (std::size_t p = 0; p < a.params.size(); ++p) {
    REQUIRE(a.params[p].second.size() == b.params[p].second.size());
    for (std::size_t i = 0; i < a.params[p].second.size(); ++i)
      CHECK(a.params[p].second[i] == b.params[p].second[i]);
  }
  Model<double> c = build_network<double>(cfg);
  init_weights(c, 124);
  bool any_diff = false;
  for (std::size_t i = 0; i < c.param("layer2.kernels").size(); ++i)
    any_diff |= c.param("layer2.kernels")[i] != a.param("layer2.kernels")[i];
  CHECK(any_diff);

  // Sample variance of the second-layer kernels over >= 1e4 draws stays
  // within 10% of 2 / fan_in.
  const TensorD& k2 = a.param("layer2.kernels");
  REQUIRE(k2.size() >= 10000);
  double fan_in = double(k2.size() / k2.dim(0));
  double mean = 0;
  for (std::size_t i = 0; i < k2.size(); ++i) mean += k2[i];
  mean /= double(k2.size());
  double var = 0;
  for (std::size_t i = 0; i < k2.size(); ++i) var += (k2[i] - mean) * (k2[i] - mean);
  var /= double(k2.size());
  double target = 2.0 / fan_in;
  CHECK(var > 0.9 * target);
  CHECK(var < 1.1 * target);

  // Scales start at one, shifts and bias at zero.
  for (std::size_t i = 0; i < a.param("layer1.bn_scale").size(); ++i)
    CHECK(a.param("layer1.bn_scale")[i] == 1.0);
  for (std::size_t i = 0; i < a.param("layer1.bn_shift").size(); ++i)
    CHECK(a.param("layer1.bn_shift")[i] == 0.0);
  CHECK(a.param("layer6.bias")[0] == 0.0);
}

TEST_CASE("forward produces the expected head shapes") {
  NetworkConfig cfg = make_default_config(4);
  cfg.pool_layers = {1, 2, 3};
  Model<float> m = build_network<float>(cfg);
  init_weights(m, 7);
  TensorF batch({2, 32, 32, 3});
  for (std::size_t i = 0; i < batch.size(); ++i) batch[i] = float(i % 17) / 17.0f;
  Tape<float> tape;
  auto fp = forward(m, tape, batch, BnMode::Train, false);
  CHECK(fp.logits.value().shape() == std::vector<std::size_t>{2, 1});
  CHECK(fp.params.size() == m.params.size());

  NetworkConfig seg = make_default_config(4);
  seg.pool_layers = {};
  seg.head = NetworkConfig::Head::PerPixel;
  Model<float> sm = build_network<float>(seg);
  init_weights(sm, 7);
  TensorF small({1, 16, 16, 3});
  small.fill(0.25f);
  Tape<float> t2;
  auto fp2 = forward(sm, t2, small, BnMode::Train, false);
  CHECK(fp2.logits.value().shape() == std::vector<std::size_t>{1, 16, 16, 1});
}

TEST_CASE("with all kernels zeroed the logits equal the output bias") {
  NetworkConfig cfg = make_default_config(2);
  cfg.pool_layers = {1};
  Model<float> m = build_network<float>(cfg);
  init_weights(m, 9);
  for (auto& [name, tensor] : m.params)
    if (name.find("kernels") != std::string::npos) tensor.fill(0.0f);
  m.param("layer6.bias")[0] = 0.7f;
  TensorF batch({3, 16, 16, 3});
  for (std::size_t i = 0; i < batch.size(); ++i) batch[i] = float((i * 31) % 11) * 0.1f;
  Tape<float> tape;
  auto fp = forward(m, tape, batch, BnMode::Inference, false);
  REQUIRE(fp.logits.value().size() == 3);
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(fp.logits.value()[i] == doctest::Approx(0.7f).epsilon(1e-6));
}

TEST_CASE("model files round-trip exactly and re-save byte-identically") {
  NetworkConfig cfg = make_default_config(4);
  cfg.pool_layers = {1, 2};
  cfg.projection = NetworkConfig::Projection::Mean;
  Model<double> m = build_network<double>(cfg);
  init_weights(m, 77);
  m.bn_states[2].running_mean[1] = 0.25;  // nontrivial stats must survive the trip
  m.bn_states[2].running_var[0] = 3.5;

  std::string path = "tmp_model.se2m";
  save_model(m, path);
  Model<double> back = load_model<double>(path);
  CHECK(back.config.n_orient == 4);
  CHECK(back.config.pool_layers == cfg.pool_layers);
  CHECK(back.config.projection == NetworkConfig::Projection::Mean);
  REQUIRE(back.params.size() == m.params.size());
  for (std::size_t p = 0; p < m.params.size(); ++p) {
    CHECK(back.params[p].first == m.params[p].first);
    for (std::size_t i = 0; i < m.params[p].second.size(); ++i)
      CHECK(back.params[p].second[i] == m.params[p].second[i]);
  }
  CHECK(back.bn_states[2].running_mean[1] == 0.25);
  CHECK(back.bn_states[2].running_var[0] == 3.5);

  std::string again = "tmp_model2.se2m";
  save_model(back, again);
  CHECK(read_file_bytes(path) == read_file_bytes(again));
  std::remove(path.c_str());
  std::remove(again.c_str());
}

TEST_CASE("model loading rejects corrupt headers") {
  NetworkConfig cfg = make_default_config(2);
  Model<float> m = build_network<float>(cfg);
  init_weights(m, 3);
  std::string path = "tmp_model3.se2m";
  save_model(m, path);
  std::string bytes = read_file_bytes(path);
  bytes[0] = 'Z';
  atomic_write_file(path, bytes);
  CHECK_THROWS_AS(load_model<float>(path), io_error);
  std::remove(path.c_str());
}

TEST_CASE("operators are shared per kernel size") {
  NetworkConfig cfg = make_default_config(8);
  Model<float> m = build_network<float>(cfg);
  auto op5 = m.op_for(5);
  auto op1 = m.op_for(1);
  CHECK(op5->mask.size() == 21);
  CHECK(op1->mask.size() == 1);
  CHECK(op5->n_orient == 8);
  CHECK(m.op_for(5).get() == op5.get());  // cached, not rebuilt
  CHECK_THROWS(m.op_for(7));
}
