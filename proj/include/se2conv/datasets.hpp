#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "se2conv/tensor.hpp"

namespace se2conv {

template <typename T>
struct LabeledPatchSet {
  Tensor<T> patches;  // [count, H, W, C]
  Tensor<T> labels;   // [count] classification, [count, H, W] per-pixel
  std::uint64_t seed = 0;
  std::string generator;
  // Glyph/curve orientation per sample where the generator has one; kept for
  // distribution checks, not serialized.
  std::vector<double> glyph_angles;

  std::size_t count() const { return patches.dim(0); }
  bool per_pixel() const { return labels.rank() == 3; }
};

// Binary classification patches, 32x32x3: each patch carries a two-stroke
// right-angle junction at uniformly random orientation and jittered position
// over textured noise. Class 1 joins the strokes at a corner, class 0 at the
// bar's midpoint, with matched ink budget, so the discriminating cue is the
// junction geometry rather than any gross intensity statistic. Labels
// alternate, so balance is exact. Deterministic in the seed.
template <typename T>
LabeledPatchSet<T> synth_rotated_patterns(std::size_t count, std::uint64_t seed);

// Per-pixel segmentation patches, 32x32x3: one random quadratic Bezier curve
// over textured noise; label mask marks curve pixels. Curve-pixel fraction is
// kept inside [0.02, 0.30] by bounded deterministic retries.
template <typename T>
LabeledPatchSet<T> synth_curve_segmentation(std::size_t count, std::uint64_t seed);

// Persists as <prefix>.patches.se2t + <prefix>.labels.se2t + <prefix>.manifest
// (key=value text). Loading verifies the manifest against the tensors.
template <typename T>
void save_dataset(const LabeledPatchSet<T>& ds, const std::string& prefix);
template <typename T>
LabeledPatchSet<T> load_dataset(const std::string& prefix);

}  // namespace se2conv
