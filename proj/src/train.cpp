#include "se2conv/train.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "se2conv/rng.hpp"
#include "se2conv/se2.hpp"

namespace se2conv {

namespace {

template <typename T>
Tensor<T> transpose_hw(const Tensor<T>& image) {
  std::size_t h = image.dim(0), w = image.dim(1), c = image.dim(2);
  Tensor<T> out({w, h, c});
  for (std::size_t r = 0; r < h; ++r)
    for (std::size_t col = 0; col < w; ++col)
      for (std::size_t k = 0; k < c; ++k)
        out[(col * h + r) * c + k] = image[(r * w + col) * c + k];
  return out;
}

int variant_count(AugmentMode m) {
  switch (m) {
    case AugmentMode::None: return 1;
    case AugmentMode::Transpose: return 2;
    case AugmentMode::TransposeRot90: return 8;
  }
  return 1;
}

// Copies patch `idx` of [count,H,W,C] as a standalone [H,W,C] tensor.
template <typename T>
Tensor<T> extract_patch(const Tensor<T>& patches, std::size_t idx) {
  std::size_t stride = patches.size() / patches.dim(0);
  Tensor<T> out({patches.dim(1), patches.dim(2), patches.dim(3)});
  for (std::size_t j = 0; j < stride; ++j) out[j] = patches[idx * stride + j];
  return out;
}

}  // namespace

template <typename T>
Tensor<T> dihedral_variant(const Tensor<T>& image, int variant) {
  if (image.rank() != 3) throw std::invalid_argument("dihedral_variant: image must be [H,W,C]");
  if (image.dim(0) != image.dim(1))
    throw std::invalid_argument("dihedral_variant: image must be square, got " +
                                shape_str(image.shape()));
  if (variant < 0 || variant > 7)
    throw std::invalid_argument("dihedral_variant: variant must be in 0..7");
  Tensor<T> out = (variant & 1) ? transpose_hw(image) : image;
  int quarter_turns = variant >> 1;
  if (quarter_turns)
    out = apply_roto_translation(out, GroupElement{0, 0, quarter_turns * (kTwoPi / 4)});
  return out;
}

namespace {

template <typename T>
Tensor<T> expand_orbit(const Tensor<T>& batch, int variants) {
  if (batch.rank() != 4)
    throw std::invalid_argument("augmentation: batch must be [B,H,W,C]");
  if (batch.dim(1) != batch.dim(2))
    throw std::invalid_argument("augmentation: patches must be square, got " +
                                shape_str(batch.shape()));
  std::size_t b = batch.dim(0);
  std::size_t stride = batch.size() / b;
  Tensor<T> out({b * std::size_t(variants), batch.dim(1), batch.dim(2), batch.dim(3)});
  for (int v = 0; v < variants; ++v)
    for (std::size_t i = 0; i < b; ++i) {
      Tensor<T> var = dihedral_variant(extract_patch(batch, i), v);
      std::size_t base = (std::size_t(v) * b + i) * stride;
      for (std::size_t j = 0; j < stride; ++j) out[base + j] = var[j];
    }
  return out;
}

}  // namespace

template <typename T>
Tensor<T> augment_transpose(const Tensor<T>& batch) {
  return expand_orbit(batch, 2);
}

template <typename T>
Tensor<T> augment_rot90(const Tensor<T>& batch) {
  return expand_orbit(batch, 8);
}

template <typename T>
TrainResult train(Model<T>& model, const LabeledPatchSet<T>& data, const TrainSettings& s,
                  std::ostream* log) {
  if (data.count() == 0) throw std::invalid_argument("train: empty dataset");
  if (s.learning_rate <= 0 || s.momentum < 0 || s.momentum >= 1 || s.batch_size < 1 ||
      s.iterations < 0 || s.log_every < 1 || s.bn_refresh_batches < 0)
    throw std::invalid_argument("train: settings out of range");
  const bool pixel_task = data.per_pixel();
  if (pixel_task && model.config.head != NetworkConfig::Head::PerPixel)
    throw std::invalid_argument("train: per-pixel labels need a per-pixel head");
  const std::size_t h = data.patches.dim(1), w = data.patches.dim(2), c = data.patches.dim(3);
  const int variants = variant_count(s.augment);

  // Batch `it` is drawn from an independent stream per iteration index:
  // reproducible regardless of history.
  auto draw_batch = [&](int it, Tensor<T>& batch, Tensor<T>* labels) {
    Rng rng(s.seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(it) + 1);
    std::size_t stride = h * w * c;
    for (int bi = 0; bi < s.batch_size; ++bi) {
      std::size_t idx = rng.uniform_index(data.count());
      int v = variants == 1 ? 0 : static_cast<int>(rng.uniform_index(std::size_t(variants)));
      Tensor<T> patch = dihedral_variant(extract_patch(data.patches, idx), v);
      for (std::size_t j = 0; j < stride; ++j) batch[std::size_t(bi) * stride + j] = patch[j];
      if (!labels) continue;
      if (pixel_task) {
        Tensor<T> mask({h, w, 1});
        for (std::size_t j = 0; j < h * w; ++j) mask[j] = data.labels[idx * h * w + j];
        Tensor<T> moved = dihedral_variant(mask, v);
        // Interpolated mask values are snapped back to binary.
        for (std::size_t j = 0; j < h * w; ++j)
          (*labels)[std::size_t(bi) * h * w + j] = moved[j] > T(0.5) ? T(1) : T(0);
      } else {
        (*labels)[std::size_t(bi)] = data.labels[idx];
      }
    }
  };

  TrainResult result;
  result.losses.reserve(static_cast<std::size_t>(s.iterations));
  for (int it = 0; it < s.iterations; ++it) {
    Tensor<T> batch({std::size_t(s.batch_size), h, w, c});
    Tensor<T> labels(pixel_task
                         ? std::vector<std::size_t>{std::size_t(s.batch_size), h, w, 1}
                         : std::vector<std::size_t>{std::size_t(s.batch_size), 1});
    draw_batch(it, batch, &labels);

    Tape<T> tape;
    auto fp = forward(model, tape, batch, BnMode::Train, true);
    Var<T> loss = logistic_loss(fp.logits, labels);
    double loss_val = static_cast<double>(loss.value()[0]);
    if (!std::isfinite(loss_val))
      throw std::runtime_error("train: diverged at iteration " + std::to_string(it + 1) +
                               " (non-finite loss)");
    tape.backward(loss.id);
    for (std::size_t p = 0; p < model.params.size(); ++p)
      sgd_momentum_step(model.params[p].second, model.velocity[p],
                        tape.grad(fp.params[p].id), static_cast<T>(s.learning_rate),
                        static_cast<T>(s.momentum));
    result.losses.push_back(loss_val);
    if (log && ((it + 1) % s.log_every == 0 || it + 1 == s.iterations)) {
      char line[64];
      std::snprintf(line, sizeof line, "iter=%d loss=%.6f\n", it + 1, loss_val);
      *log << line;
    }
  }

  // Running statistics tracked during SGD describe earlier weights; re-estimate
  // them under the final weights with forward-only batches drawn from the same
  // stream (indices continue past the last step, keeping runs reproducible).
  if (s.iterations > 0) {
    for (int it = 0; it < s.bn_refresh_batches; ++it) {
      Tensor<T> batch({std::size_t(s.batch_size), h, w, c});
      draw_batch(s.iterations + it, batch, nullptr);
      Tape<T> tape;
      forward(model, tape, batch, BnMode::Train, true);
    }
  }
  return result;
}

template <typename T>
std::vector<double> predict_logits(Model<T>& model, const Tensor<T>& patches, AugmentMode tta,
                                   int batch_size) {
  if (patches.rank() != 4)
    throw std::invalid_argument("predict_logits: patches must be [B,H,W,C]");
  if (model.config.head != NetworkConfig::Head::GlobalMax)
    throw std::invalid_argument("predict_logits: needs a classification head");
  const std::size_t count = patches.dim(0);
  const std::size_t h = patches.dim(1), w = patches.dim(2), c = patches.dim(3);
  const std::size_t stride = h * w * c;
  const int variants = variant_count(tta);
  std::vector<double> out(count, 0.0);
  for (std::size_t start = 0; start < count; start += std::size_t(batch_size)) {
    std::size_t nb = std::min(std::size_t(batch_size), count - start);
    for (int v = 0; v < variants; ++v) {
      Tensor<T> batch({nb, h, w, c});
      for (std::size_t i = 0; i < nb; ++i) {
        Tensor<T> patch = extract_patch(patches, start + i);
        if (v) patch = dihedral_variant(patch, v);
        for (std::size_t j = 0; j < stride; ++j) batch[i * stride + j] = patch[j];
      }
      Tape<T> tape;
      auto fp = forward(model, tape, batch, BnMode::Inference, false);
      const Tensor<T>& logits = fp.logits.value();
      for (std::size_t i = 0; i < nb; ++i)
        out[start + i] += static_cast<double>(logits[i * logits.dim(1)]);
    }
  }
  for (double& v : out) v /= variants;
  return out;
}

template <typename T>
double accuracy(Model<T>& model, const LabeledPatchSet<T>& data, AugmentMode tta,
                int batch_size) {
  if (data.per_pixel()) throw std::invalid_argument("accuracy: needs per-patch labels");
  std::vector<double> logits = predict_logits(model, data.patches, tta, batch_size);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    int pred = logits[i] > 0 ? 1 : 0;
    if (pred == static_cast<int>(data.labels[i])) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(logits.size());
}

template <typename T>
Tensor<T> predict_pixel_probs(Model<T>& model, const Tensor<T>& patches, int batch_size) {
  if (patches.rank() != 4)
    throw std::invalid_argument("predict_pixel_probs: patches must be [B,H,W,C]");
  if (model.config.head != NetworkConfig::Head::PerPixel)
    throw std::invalid_argument("predict_pixel_probs: needs a per-pixel head");
  const std::size_t count = patches.dim(0), h = patches.dim(1), w = patches.dim(2);
  const std::size_t stride = h * w * patches.dim(3);
  Tensor<T> probs({count, h, w});
  for (std::size_t start = 0; start < count; start += std::size_t(batch_size)) {
    std::size_t nb = std::min(std::size_t(batch_size), count - start);
    Tensor<T> batch({nb, h, w, patches.dim(3)});
    for (std::size_t j = 0; j < nb * stride; ++j) batch[j] = patches[start * stride + j];
    Tape<T> tape;
    auto fp = forward(model, tape, batch, BnMode::Inference, false);
    const Tensor<T>& logits = fp.logits.value();  // [nb, h, w, 1]
    if (logits.dim(1) != h || logits.dim(2) != w)
      throw std::invalid_argument("predict_pixel_probs: pooling changed the map size");
    for (std::size_t j = 0; j < nb * h * w; ++j) {
      double z = static_cast<double>(logits[j]);
      probs[start * h * w + j] = static_cast<T>(1.0 / (1.0 + std::exp(-z)));
    }
  }
  return probs;
}

#define SE2CONV_INSTANTIATE(T)                                                             \
  template Tensor<T> dihedral_variant<T>(const Tensor<T>&, int);                           \
  template Tensor<T> augment_transpose<T>(const Tensor<T>&);                               \
  template Tensor<T> augment_rot90<T>(const Tensor<T>&);                                   \
  template TrainResult train<T>(Model<T>&, const LabeledPatchSet<T>&, const TrainSettings&, \
                                std::ostream*);                                            \
  template std::vector<double> predict_logits<T>(Model<T>&, const Tensor<T>&, AugmentMode, \
                                                 int);                                     \
  template double accuracy<T>(Model<T>&, const LabeledPatchSet<T>&, AugmentMode, int);     \
  template Tensor<T> predict_pixel_probs<T>(Model<T>&, const Tensor<T>&, int);

SE2CONV_INSTANTIATE(float)
SE2CONV_INSTANTIATE(double)
#undef SE2CONV_INSTANTIATE

}  // namespace se2conv
