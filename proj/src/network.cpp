#include "se2conv/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "se2conv/rng.hpp"
#include "se2conv/tensor_io.hpp"

namespace se2conv {

std::array<int, 6> default_channels(int n_orient) {
  if (n_orient >= 16) return {6, 6, 6, 4, 16, 1};
  if (n_orient >= 8) return {8, 8, 8, 8, 16, 1};
  if (n_orient >= 4) return {10, 10, 10, 16, 16, 1};
  if (n_orient >= 2) return {13, 13, 13, 32, 16, 1};
  return {16, 16, 16, 64, 16, 1};
}

NetworkConfig make_default_config(int n_orient) {
  NetworkConfig cfg;
  cfg.n_orient = n_orient;
  cfg.channels = default_channels(n_orient);
  return cfg;
}

namespace {

void validate_config(const NetworkConfig& cfg) {
  if (cfg.n_orient < 1) throw std::invalid_argument("config: n_orient must be >= 1");
  if (cfg.in_channels < 1) throw std::invalid_argument("config: in_channels must be >= 1");
  for (int c : cfg.channels)
    if (c < 1) throw std::invalid_argument("config: channel counts must be >= 1");
  for (int k : cfg.kernel_sizes)
    if (k < 1 || k % 2 == 0)
      throw std::invalid_argument("config: kernel sizes must be odd and positive");
  for (int p : cfg.pool_layers)
    if (p < 1 || p > 6) throw std::invalid_argument("config: pool layers must be in 1..6");
  if (cfg.bn_epsilon <= 0) throw std::invalid_argument("config: bn_epsilon must be positive");
}

std::string layer_name(int l, const char* suffix) {
  return "layer" + std::to_string(l) + "." + suffix;
}

}  // namespace

template <typename T>
Tensor<T>& Model<T>::param(const std::string& name) {
  for (auto& [n, t] : params)
    if (n == name) return t;
  throw std::invalid_argument("model has no parameter '" + name + "'");
}

template <typename T>
const Tensor<T>& Model<T>::param(const std::string& name) const {
  for (auto& [n, t] : params)
    if (n == name) return t;
  throw std::invalid_argument("model has no parameter '" + name + "'");
}

template <typename T>
std::shared_ptr<const RotationOperator> Model<T>::op_for(int kernel_size) const {
  for (auto& [n, op] : operators)
    if (n == kernel_size) return op;
  throw std::invalid_argument("model has no rotation operator for kernel size " +
                              std::to_string(kernel_size));
}

template <typename T>
Model<T> build_network(const NetworkConfig& config) {
  validate_config(config);
  Model<T> model;
  model.config = config;
  const int n_or = config.n_orient;

  for (int l = 1; l <= 5; ++l) {
    int k = config.kernel_sizes[std::size_t(l - 1)];
    if (!std::any_of(model.operators.begin(), model.operators.end(),
                     [k](auto& p) { return p.first == k; }))
      model.operators.emplace_back(
          k, std::make_shared<RotationOperator>(build_rotation_operator(k, n_or)));
  }

  auto add = [&](const std::string& name, std::vector<std::size_t> shape) {
    model.params.emplace_back(name, Tensor<T>(std::move(shape)));
  };

  for (int l = 1; l <= 5; ++l) {
    std::size_t cout = std::size_t(config.channels[std::size_t(l - 1)]);
    std::size_t cin =
        l == 1 ? std::size_t(config.in_channels) : std::size_t(config.channels[std::size_t(l - 2)]);
    std::size_t m = model.op_for(config.kernel_sizes[std::size_t(l - 1)])->mask.size();
    if (l == 1)
      add(layer_name(l, "kernels"), {cout, cin, m});
    else
      add(layer_name(l, "kernels"), {cout, cin, std::size_t(n_or), m});
    add(layer_name(l, "bn_scale"), {cout});
    add(layer_name(l, "bn_shift"), {cout});
  }
  std::size_t c5 = std::size_t(config.channels[4]), c6 = std::size_t(config.channels[5]);
  std::size_t k6 = std::size_t(config.kernel_sizes[5]);
  add(layer_name(6, "kernels"), {k6, k6, c5, c6});
  add(layer_name(6, "bias"), {c6});

  model.velocity.resize(model.params.size());
  model.bn_states.resize(5);
  for (int l = 1; l <= 5; ++l) {
    std::size_t c = std::size_t(config.channels[std::size_t(l - 1)]);
    model.bn_states[std::size_t(l - 1)].running_mean = Tensor<T>({c});
    model.bn_states[std::size_t(l - 1)].running_var = Tensor<T>({c}, T(1));
  }
  return model;
}

template <typename T>
WeightCount count_weights(const Model<T>& model) {
  WeightCount wc;
  for (auto& [name, t] : model.params) {
    int l = name[5] - '1';  // names are "layerL.xxx" with L in 1..6
    wc.per_layer[std::size_t(l)] += static_cast<long long>(t.size());
    wc.total += static_cast<long long>(t.size());
  }
  return wc;
}

template <typename T>
void init_weights(Model<T>& model, std::uint64_t seed) {
  Rng rng(seed);
  for (auto& [name, t] : model.params) {
    if (name.ends_with(".kernels")) {
      // fan-in: every kernel axis except the output-channel one (axis 0 for
      // layers 1-5, the last axis for the planar layer 6).
      std::size_t fan_in = name == "layer6.kernels" ? t.size() / t.dim(t.rank() - 1)
                                                    : t.size() / t.dim(0);
      T stddev = static_cast<T>(std::sqrt(2.0 / static_cast<double>(fan_in)));
      for (std::size_t i = 0; i < t.size(); ++i)
        t[i] = static_cast<T>(rng.gaussian()) * stddev;
    } else if (name.ends_with(".bn_scale")) {
      t.fill(T(1));
    } else {
      t.fill(T(0));  // bn_shift, bias
    }
  }
  for (auto& v : model.velocity) v = Tensor<T>();
  for (auto& st : model.bn_states) {
    st.running_mean.fill(T(0));
    st.running_var.fill(T(1));
  }
}

template <typename T>
ForwardPass<T> forward(Model<T>& model, Tape<T>& tape, const Tensor<T>& batch, BnMode mode,
                       bool update_running) {
  const NetworkConfig& cfg = model.config;
  if (batch.rank() != 4)
    throw std::invalid_argument("forward: batch must be [B,H,W,C]");
  if (batch.dim(3) != std::size_t(cfg.in_channels))
    throw std::invalid_argument("forward: batch has " + std::to_string(batch.dim(3)) +
                                " channels, config expects " +
                                std::to_string(cfg.in_channels));

  ForwardPass<T> fp;
  fp.params.reserve(model.params.size());
  for (auto& [name, t] : model.params) fp.params.push_back(tape.parameter(t));
  auto pvar = [&](const std::string& name) {
    for (std::size_t i = 0; i < model.params.size(); ++i)
      if (model.params[i].first == name) return fp.params[i];
    throw std::invalid_argument("forward: missing parameter '" + name + "'");
  };
  auto pooled = [&](int l) {
    return std::find(cfg.pool_layers.begin(), cfg.pool_layers.end(), l) !=
           cfg.pool_layers.end();
  };

  Var<T> v = tape.input(batch);
  T eps = static_cast<T>(cfg.bn_epsilon);
  for (int l = 1; l <= 5; ++l) {
    auto op = model.op_for(cfg.kernel_sizes[std::size_t(l - 1)]);
    Var<T> k = pvar(layer_name(l, "kernels"));
    v = l == 1 ? lift_correlate(v, k, op) : group_correlate(v, k, op);
    v = batch_norm(v, pvar(layer_name(l, "bn_scale")), pvar(layer_name(l, "bn_shift")),
                   &model.bn_states[std::size_t(l - 1)], eps, mode, update_running);
    v = relu(v);
    if (pooled(l)) v = max_pool2d(v, 2);
  }
  v = cfg.projection == NetworkConfig::Projection::Max ? project_max_orientations(v)
                                                       : project_mean_orientations(v);
  v = correlate2d(v, pvar(layer_name(6, "kernels")), Padding::SameZero, 1);
  v = add_channel_bias(v, pvar(layer_name(6, "bias")));
  if (pooled(6)) v = max_pool2d(v, 2);
  if (cfg.head == NetworkConfig::Head::GlobalMax) v = global_spatial_max(v);
  fp.logits = v;
  return fp;
}

// --- serialization ---------------------------------------------------------------

namespace {

std::string head_name(NetworkConfig::Head h) {
  return h == NetworkConfig::Head::GlobalMax ? "global_max" : "per_pixel";
}
std::string projection_name(NetworkConfig::Projection p) {
  return p == NetworkConfig::Projection::Max ? "max" : "mean";
}

std::string config_text(const NetworkConfig& cfg) {
  std::ostringstream os;
  os << "n_orient=" << cfg.n_orient << "\n";
  os << "in_channels=" << cfg.in_channels << "\n";
  os << "channels=";
  for (int i = 0; i < 6; ++i) os << (i ? "," : "") << cfg.channels[std::size_t(i)];
  os << "\nkernel_sizes=";
  for (int i = 0; i < 6; ++i) os << (i ? "," : "") << cfg.kernel_sizes[std::size_t(i)];
  os << "\npool_layers=";
  for (std::size_t i = 0; i < cfg.pool_layers.size(); ++i)
    os << (i ? "," : "") << cfg.pool_layers[i];
  os << "\nhead=" << head_name(cfg.head) << "\n";
  os << "projection=" << projection_name(cfg.projection) << "\n";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", cfg.bn_epsilon);
  os << "bn_epsilon=" << buf << "\n";
  return os.str();
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',') {
      out.push_back(std::stoi(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(std::stoi(cur));
  return out;
}

NetworkConfig parse_config_text(const std::string& text) {
  NetworkConfig cfg;
  cfg.pool_layers.clear();
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw io_error("model config: malformed line '" + line + "'");
    std::string key = line.substr(0, eq), val = line.substr(eq + 1);
    if (key == "n_orient") {
      cfg.n_orient = std::stoi(val);
    } else if (key == "in_channels") {
      cfg.in_channels = std::stoi(val);
    } else if (key == "channels" || key == "kernel_sizes") {
      auto v = parse_int_list(val);
      if (v.size() != 6) throw io_error("model config: " + key + " must list 6 values");
      auto& dst = key == "channels" ? cfg.channels : cfg.kernel_sizes;
      std::copy(v.begin(), v.end(), dst.begin());
    } else if (key == "pool_layers") {
      cfg.pool_layers = parse_int_list(val);
    } else if (key == "head") {
      if (val == "global_max")
        cfg.head = NetworkConfig::Head::GlobalMax;
      else if (val == "per_pixel")
        cfg.head = NetworkConfig::Head::PerPixel;
      else
        throw io_error("model config: unknown head '" + val + "'");
    } else if (key == "projection") {
      if (val == "max")
        cfg.projection = NetworkConfig::Projection::Max;
      else if (val == "mean")
        cfg.projection = NetworkConfig::Projection::Mean;
      else
        throw io_error("model config: unknown projection '" + val + "'");
    } else if (key == "bn_epsilon") {
      cfg.bn_epsilon = std::stod(val);
    } else {
      throw io_error("model config: unknown key '" + key + "'");
    }
  }
  return cfg;
}

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16),
                        static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (!is) throw io_error("model file: truncated");
  return std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 | std::uint32_t(b[2]) << 16 |
         std::uint32_t(b[3]) << 24;
}

template <typename T>
void write_named(std::ostream& os, const std::string& name, const Tensor<T>& t) {
  put_u32(os, static_cast<std::uint32_t>(name.size()));
  os.write(name.data(), static_cast<std::streamsize>(name.size()));
  write_se2t(os, t);
}

}  // namespace

template <typename T>
void save_model(const Model<T>& model, const std::string& path) {
  std::ostringstream os(std::ios::binary);
  os.write("SE2M", 4);
  os.put(1);  // version
  std::string cfg = config_text(model.config);
  put_u32(os, static_cast<std::uint32_t>(cfg.size()));
  os.write(cfg.data(), static_cast<std::streamsize>(cfg.size()));
  for (auto& [name, t] : model.params) write_named(os, name, t);
  for (std::size_t l = 0; l < model.bn_states.size(); ++l) {
    write_named(os, layer_name(static_cast<int>(l) + 1, "bn_mean"),
                model.bn_states[l].running_mean);
    write_named(os, layer_name(static_cast<int>(l) + 1, "bn_var"),
                model.bn_states[l].running_var);
  }
  atomic_write_file(path, os.str());
}

template <typename T>
Model<T> load_model(const std::string& path) {
  std::istringstream is(read_file_bytes(path), std::ios::binary);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::string(magic, 4) != "SE2M")
    throw io_error("model file '" + path + "': bad magic");
  int version = is.get();
  if (version != 1)
    throw io_error("model file '" + path + "': unsupported version " + std::to_string(version));
  std::uint32_t cfg_len = get_u32(is);
  std::string cfg_text(cfg_len, '\0');
  is.read(cfg_text.data(), cfg_len);
  if (!is) throw io_error("model file '" + path + "': truncated config");

  Model<T> model = build_network<T>(parse_config_text(cfg_text));
  std::size_t loaded = 0;
  while (true) {
    int peek = is.peek();
    if (peek == std::char_traits<char>::eof()) break;
    std::uint32_t name_len = get_u32(is);
    if (name_len > 4096) throw io_error("model file '" + path + "': absurd name length");
    std::string name(name_len, '\0');
    is.read(name.data(), name_len);
    if (!is) throw io_error("model file '" + path + "': truncated name");
    Tensor<T> t = read_se2t<T>(is);
    if (name.ends_with(".bn_mean") || name.ends_with(".bn_var")) {
      int l = name[5] - '1';
      if (l < 0 || l >= static_cast<int>(model.bn_states.size()))
        throw io_error("model file '" + path + "': unknown tensor '" + name + "'");
      auto& st = model.bn_states[std::size_t(l)];
      Tensor<T>& dst = name.ends_with(".bn_mean") ? st.running_mean : st.running_var;
      if (dst.shape() != t.shape())
        throw io_error("model file '" + path + "': shape mismatch for '" + name + "'");
      dst = std::move(t);
    } else {
      Tensor<T>& dst = model.param(name);
      if (dst.shape() != t.shape())
        throw io_error("model file '" + path + "': shape mismatch for '" + name + "'");
      dst = std::move(t);
      ++loaded;
    }
  }
  if (loaded != model.params.size())
    throw io_error("model file '" + path + "': expected " +
                   std::to_string(model.params.size()) + " parameter tensors, found " +
                   std::to_string(loaded));
  return model;
}

#define SE2CONV_INSTANTIATE(T)                                                    \
  template struct Model<T>;                                                       \
  template Model<T> build_network<T>(const NetworkConfig&);                       \
  template WeightCount count_weights<T>(const Model<T>&);                         \
  template void init_weights<T>(Model<T>&, std::uint64_t);                        \
  template ForwardPass<T> forward<T>(Model<T>&, Tape<T>&, const Tensor<T>&,       \
                                     BnMode, bool);                               \
  template void save_model<T>(const Model<T>&, const std::string&);               \
  template Model<T> load_model<T>(const std::string&);

SE2CONV_INSTANTIATE(float)
SE2CONV_INSTANTIATE(double)
#undef SE2CONV_INSTANTIATE

}  // namespace se2conv
