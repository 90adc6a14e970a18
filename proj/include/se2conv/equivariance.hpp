#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "se2conv/network.hpp"
#include "se2conv/rng.hpp"
#include "se2conv/se2.hpp"

namespace se2conv {

// One layer- or chain-level comparison between "transform then apply" and
// "apply then transform". Errors are interior L2 norms, excluding `margin`
// pixels from every spatial border (padding and translation contaminate a
// boundary band only). `grid_exact` marks quarter-turn angles with integer
// translations, where both paths are exact permutations up to rounding.
struct EquivarianceReport {
  std::string name;
  DiscreteGroupElement g;
  int margin = 0;
  double abs_error = 0;
  double rel_error = 0;
  bool grid_exact = false;
};

// lift(roto-translated image) vs shift-twisted lift(image).
template <typename T>
EquivarianceReport lifting_covariance_error(const Tensor<T>& image /*[H,W,C]*/,
                                            const Tensor<T>& kernels /*[Cout,Cin,M]*/,
                                            const RotationOperator& op,
                                            const DiscreteGroupElement& g);

// group_correlate(shift-twisted stack) vs shift-twisted group_correlate(stack).
template <typename T>
EquivarianceReport gconv_covariance_error(const Tensor<T>& stack /*[H,W,N,C]*/,
                                          const Tensor<T>& kernels /*[Cout,Cin,N,M]*/,
                                          const RotationOperator& op,
                                          const DiscreteGroupElement& g);

// project(shift-twisted stack) vs roto-translated project(stack).
template <typename T>
EquivarianceReport projection_covariance_error(const Tensor<T>& stack /*[H,W,N,C]*/,
                                               const DiscreteGroupElement& g);

// Full-network check in inference mode. With a global-max head the two scalar
// logit vectors are compared directly (rotation invariance); with a per-pixel
// head the logit maps are compared after transforming one of them (rotation
// covariance). Pooling requires the translation to be divisible by the total
// pooling factor.
template <typename T>
EquivarianceReport chain_invariance_check(Model<T>& model, const Tensor<T>& image /*[H,W,C]*/,
                                          const DiscreteGroupElement& g);

// Smooth band-limited test image: a sum of random Gaussian blobs with
// per-channel amplitudes, standard deviations drawn from [sigma_lo, sigma_hi].
template <typename T>
Tensor<T> gaussian_mixture_image(int h, int w, int c, int blobs, double sigma_lo,
                                 double sigma_hi, std::uint64_t seed);

// Random smooth orientation stack [H,W,N,C] built the same way.
template <typename T>
Tensor<T> gaussian_mixture_stack(int h, int w, int n, int c, int blobs, double sigma_lo,
                                 double sigma_hi, std::uint64_t seed);

// Disk-supported kernels sampled from wide random lobes and windowed to zero
// at the disk edge. Rotating such a kernel between grid angles is a
// second-order perturbation: no jump at the masked boundary, no frequency
// content near the grid Nyquist rate. Used by the interpolated-angle
// covariance checks; the shape's trailing extent must be a multiple of the
// mask size.
template <typename T>
Tensor<T> smooth_disk_kernels(Rng& rng, std::vector<std::size_t> shape, const DiskMask& mask);

// --- gradient audits ---------------------------------------------------------

struct GradientAuditEntry {
  std::string name;
  double max_rel_err = 0;
  bool pass = false;  // max_rel_err < 1e-6
};

// Finite-difference check of every layer type in double precision
// (epsilon 1e-5): elementwise gradients of all inputs and parameters, relative
// error measured where |analytic| or |numeric| exceeds 1e-8.
std::vector<GradientAuditEntry> gradient_audit(std::uint64_t seed);

struct ChainAuditResult {
  double max_rel_err = 0;
  std::size_t coords_checked = 0;
};

// Same check through an entire network: analytic gradients of a logistic loss
// against central differences at `coords_per_tensor` sampled coordinates of
// every parameter tensor.
ChainAuditResult chain_gradient_audit(const NetworkConfig& cfg, std::uint64_t seed,
                                      int coords_per_tensor);

}  // namespace se2conv
