#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "se2conv/datasets.hpp"
#include "se2conv/network.hpp"

namespace se2conv {

enum class AugmentMode { None, Transpose, TransposeRot90 };

struct TrainSettings {
  double learning_rate = 0.01;
  double momentum = 0.9;
  int batch_size = 64;
  int iterations = 2000;
  AugmentMode augment = AugmentMode::None;
  std::uint64_t seed = 0;
  int log_every = 50;
  // Forward-only batches run after the last step to re-estimate batch-norm
  // running statistics under the final weights. Statistics tracked while the
  // weights were still moving are stale for the weights that get saved; the
  // gap is worst for augmented non-equivariant models, whose statistics also
  // move with each batch's framing mix. 0 disables the refresh.
  int bn_refresh_batches = 400;
};

struct TrainResult {
  std::vector<double> losses;  // one entry per iteration
};

// One of the 8 square-image symmetries: rot90^(v/2) applied after an optional
// transpose (v&1). Quarter turns are exact grid permutations. [H,W,C], H==W.
template <typename T>
Tensor<T> dihedral_variant(const Tensor<T>& image, int variant);

// Orbit expansion of a [B,H,W,C] batch: all variants of every patch, variant
// index outermost. Transpose yields 2B patches, rot90 the full 8B dihedral
// orbit. Patches must be square.
template <typename T>
Tensor<T> augment_transpose(const Tensor<T>& batch);
template <typename T>
Tensor<T> augment_rot90(const Tensor<T>& batch);

// SGD with momentum on a logistic loss. Batches are drawn with a per-iteration
// seed derived from settings.seed, so runs are reproducible; train-time
// augmentation picks one variant per drawn sample. Writes fixed-format
// "iter=N loss=..." lines to `log` every log_every iterations. Non-finite
// loss aborts with a diagnostic. After the last step (and only if any step
// ran), bn_refresh_batches forward-only batches re-estimate the batch-norm
// running statistics; the refresh draws from the same deterministic stream,
// so same-seed runs stay bitwise identical.
template <typename T>
TrainResult train(Model<T>& model, const LabeledPatchSet<T>& data, const TrainSettings& settings,
                  std::ostream* log = nullptr);

// Inference-mode logits for a classification-head model, optionally averaged
// over the augmentation variant set (test-time augmentation). Returns one
// logit per patch.
template <typename T>
std::vector<double> predict_logits(Model<T>& model, const Tensor<T>& patches, AugmentMode tta,
                                   int batch_size = 64);

// Fraction of patches whose thresholded logit (> 0) matches the label.
template <typename T>
double accuracy(Model<T>& model, const LabeledPatchSet<T>& data, AugmentMode tta,
                int batch_size = 64);

// Per-pixel sigmoid probabilities for a per-pixel-head model: [count,H,W].
template <typename T>
Tensor<T> predict_pixel_probs(Model<T>& model, const Tensor<T>& patches, int batch_size = 16);

}  // namespace se2conv
