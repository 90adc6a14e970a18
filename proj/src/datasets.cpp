#include "se2conv/datasets.hpp"

#include <cmath>
#include <sstream>

#include "se2conv/rng.hpp"
#include "se2conv/tensor_io.hpp"

namespace se2conv {

namespace {

constexpr int kSide = 32;
constexpr int kChannels = 3;

struct Canvas {
  std::vector<double> ink;  // [kSide * kSide]
  Canvas() : ink(std::size_t(kSide) * kSide, 0.0) {}

  // Soft stamp: a small Gaussian footprint around a continuous position.
  void splat(double r, double c, double amplitude) {
    const double sigma2 = 2.0 * 0.8 * 0.8;
    int r0 = static_cast<int>(std::floor(r)) - 1, c0 = static_cast<int>(std::floor(c)) - 1;
    for (int dr = 0; dr < 4; ++dr)
      for (int dc = 0; dc < 4; ++dc) {
        int rr = r0 + dr, cc = c0 + dc;
        if (rr < 0 || rr >= kSide || cc < 0 || cc >= kSide) continue;
        double d2 = (rr - r) * (rr - r) + (cc - c) * (cc - c);
        ink[std::size_t(rr) * kSide + cc] += amplitude * std::exp(-d2 / sigma2);
      }
  }

  void stroke(double r0, double c0, double r1, double c1, double amplitude) {
    double len = std::hypot(r1 - r0, c1 - c0);
    int steps = std::max(2, static_cast<int>(len / 0.3));
    for (int i = 0; i <= steps; ++i) {
      double t = static_cast<double>(i) / steps;
      splat(r0 + t * (r1 - r0), c0 + t * (c1 - c0), amplitude / steps * len * 0.3);
    }
  }
};

// Textured background: pixel noise plus a couple of smooth bumps.
void fill_background(Rng& rng, std::vector<double>& px /* [H*W*C] */) {
  double base = 0.30 + 0.10 * rng.uniform();
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = base + 0.16 * (rng.uniform() - 0.5);
  for (int b = 0; b < 2; ++b) {
    double br = rng.uniform(4.0, kSide - 4.0), bc = rng.uniform(4.0, kSide - 4.0);
    double sigma2 = 2.0 * rng.uniform(3.0, 6.0) * rng.uniform(3.0, 6.0);
    double amp = rng.uniform(-0.12, 0.12);
    for (int r = 0; r < kSide; ++r)
      for (int c = 0; c < kSide; ++c) {
        double d2 = (r - br) * (r - br) + (c - bc) * (c - bc);
        double v = amp * std::exp(-d2 / sigma2);
        for (int k = 0; k < kChannels; ++k)
          px[(std::size_t(r) * kSide + c) * kChannels + k] += v;
      }
  }
}

void compose(const Canvas& canvas, Rng& rng, std::vector<double>& px) {
  double tint[kChannels];
  for (double& t : tint) t = rng.uniform(0.85, 1.0);
  for (int r = 0; r < kSide; ++r)
    for (int c = 0; c < kSide; ++c) {
      double v = canvas.ink[std::size_t(r) * kSide + c];
      if (v == 0) continue;
      for (int k = 0; k < kChannels; ++k) {
        double& p = px[(std::size_t(r) * kSide + c) * kChannels + k];
        p += v * tint[k];
      }
    }
  for (double& p : px) p = p < 0 ? 0 : (p > 1 ? 1 : p);
}

}  // namespace

template <typename T>
LabeledPatchSet<T> synth_rotated_patterns(std::size_t count, std::uint64_t seed) {
  LabeledPatchSet<T> ds;
  ds.seed = seed;
  ds.generator = "rotated_patterns";
  ds.patches = Tensor<T>({count, kSide, kSide, kChannels});
  ds.labels = Tensor<T>({count});
  ds.glyph_angles.reserve(count);
  Rng rng(seed);
  std::vector<double> px(std::size_t(kSide) * kSide * kChannels);
  for (std::size_t i = 0; i < count; ++i) {
    int label = static_cast<int>(i % 2);
    fill_background(rng, px);
    double theta = rng.uniform(0.0, 6.283185307179586);
    double cr = kSide / 2.0 - 0.5 + rng.uniform(-4.0, 4.0);
    double cc = kSide / 2.0 - 0.5 + rng.uniform(-4.0, 4.0);
    double amp = rng.uniform(0.38, 0.52);
    double dr = std::sin(theta), dc = std::cos(theta);  // unit direction
    Canvas canvas;
    // Both classes are a two-stroke right-angle junction with the same ink
    // budget; they differ only in where the cross stroke attaches. Gross
    // statistics (ink total, spread) match, so telling them apart needs
    // orientation-sensitive junction features at every glyph angle.
    if (label == 1) {
      // Corner junction: arms of 10 and 8 share an endpoint.
      canvas.stroke(cr, cc, cr + 10.0 * dr, cc + 10.0 * dc, amp);
      canvas.stroke(cr, cc, cr - 8.0 * dc, cc + 8.0 * dr, amp);
    } else {
      // Mid junction: a 13-long bar through the same point with a 9-stem from
      // its middle; amplitude scaled to the corner glyph's ink budget.
      double a = amp * (18.0 / 22.0);
      canvas.stroke(cr - 6.5 * dr, cc - 6.5 * dc, cr + 6.5 * dr, cc + 6.5 * dc, a);
      canvas.stroke(cr, cc, cr - 9.0 * dc, cc + 9.0 * dr, a);
    }
    compose(canvas, rng, px);
    for (std::size_t j = 0; j < px.size(); ++j)
      ds.patches[i * px.size() + j] = static_cast<T>(px[j]);
    ds.labels[i] = static_cast<T>(label);
    ds.glyph_angles.push_back(theta);
  }
  return ds;
}

template <typename T>
LabeledPatchSet<T> synth_curve_segmentation(std::size_t count, std::uint64_t seed) {
  LabeledPatchSet<T> ds;
  ds.seed = seed;
  ds.generator = "curve_segmentation";
  ds.patches = Tensor<T>({count, kSide, kSide, kChannels});
  ds.labels = Tensor<T>({count, kSide, kSide});
  ds.glyph_angles.reserve(count);
  Rng rng(seed);
  std::vector<double> px(std::size_t(kSide) * kSide * kChannels);
  const double lo = 0.02, hi = 0.30;
  for (std::size_t i = 0; i < count; ++i) {
    fill_background(rng, px);
    Canvas canvas;
    double theta = 0;
    for (int attempt = 0; attempt < 16; ++attempt) {
      Canvas trial;
      double p0r = rng.uniform(3.0, kSide - 3.0), p0c = rng.uniform(3.0, kSide - 3.0);
      double p2r = rng.uniform(3.0, kSide - 3.0), p2c = rng.uniform(3.0, kSide - 3.0);
      double p1r = 0.5 * (p0r + p2r) + rng.uniform(-8.0, 8.0);
      double p1c = 0.5 * (p0c + p2c) + rng.uniform(-8.0, 8.0);
      // Quadratic Bezier, drawn as short chords.
      double prev_r = p0r, prev_c = p0c;
      for (int s = 1; s <= 24; ++s) {
        double t = static_cast<double>(s) / 24;
        double u = 1 - t;
        double r = u * u * p0r + 2 * u * t * p1r + t * t * p2r;
        double c = u * u * p0c + 2 * u * t * p1c + t * t * p2c;
        trial.stroke(prev_r, prev_c, r, c, 0.9);
        prev_r = r;
        prev_c = c;
      }
      std::size_t on = 0;
      for (double v : trial.ink) on += v > 0.25 ? 1 : 0;
      double frac = static_cast<double>(on) / trial.ink.size();
      if ((frac >= lo && frac <= hi) || attempt == 15) {
        canvas = trial;
        theta = std::atan2(p2r - p0r, p2c - p0c);
        break;
      }
    }
    std::size_t base = i * canvas.ink.size();
    for (std::size_t j = 0; j < canvas.ink.size(); ++j)
      ds.labels[base + j] = canvas.ink[j] > 0.25 ? T(1) : T(0);
    compose(canvas, rng, px);
    for (std::size_t j = 0; j < px.size(); ++j)
      ds.patches[i * px.size() + j] = static_cast<T>(px[j]);
    ds.glyph_angles.push_back(theta);
  }
  return ds;
}

template <typename T>
void save_dataset(const LabeledPatchSet<T>& ds, const std::string& prefix) {
  write_se2t_file(prefix + ".patches.se2t", ds.patches);
  write_se2t_file(prefix + ".labels.se2t", ds.labels);
  std::ostringstream os;
  os << "generator=" << ds.generator << "\n";
  os << "count=" << ds.count() << "\n";
  os << "seed=" << ds.seed << "\n";
  os << "patch_shape=" << shape_str(ds.patches.shape()) << "\n";
  os << "label_shape=" << shape_str(ds.labels.shape()) << "\n";
  atomic_write_file(prefix + ".manifest", os.str());
}

template <typename T>
LabeledPatchSet<T> load_dataset(const std::string& prefix) {
  LabeledPatchSet<T> ds;
  ds.patches = read_se2t_file_any<T>(prefix + ".patches.se2t");
  ds.labels = read_se2t_file_any<T>(prefix + ".labels.se2t");
  std::istringstream is(read_file_bytes(prefix + ".manifest"));
  std::string line;
  while (std::getline(is, line)) {
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq), val = line.substr(eq + 1);
    if (key == "generator") ds.generator = val;
    if (key == "seed") ds.seed = std::stoull(val);
    if (key == "count" && std::stoull(val) != ds.patches.dim(0))
      throw io_error("dataset '" + prefix + "': manifest count disagrees with tensors");
    if (key == "patch_shape" && val != shape_str(ds.patches.shape()))
      throw io_error("dataset '" + prefix + "': manifest patch shape disagrees with tensor");
    if (key == "label_shape" && val != shape_str(ds.labels.shape()))
      throw io_error("dataset '" + prefix + "': manifest label shape disagrees with tensor");
  }
  if (ds.labels.dim(0) != ds.patches.dim(0))
    throw io_error("dataset '" + prefix + "': patch/label counts disagree");
  return ds;
}

#define SE2CONV_INSTANTIATE(T)                                                      \
  template struct LabeledPatchSet<T>;                                               \
  template LabeledPatchSet<T> synth_rotated_patterns<T>(std::size_t, std::uint64_t); \
  template LabeledPatchSet<T> synth_curve_segmentation<T>(std::size_t,              \
                                                          std::uint64_t);           \
  template void save_dataset<T>(const LabeledPatchSet<T>&, const std::string&);     \
  template LabeledPatchSet<T> load_dataset<T>(const std::string&);

SE2CONV_INSTANTIATE(float)
SE2CONV_INSTANTIATE(double)
#undef SE2CONV_INSTANTIATE

}  // namespace se2conv
