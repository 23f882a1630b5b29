#pragma once

#include <span>
#include <utility>
#include <vector>

#include "rpcf/spectral.hpp"

namespace rpcf {

// All spatial objects below live on the filter grid with the target centered
// on the origin cell: offsets are wrapped, so cell (H-1, 0) sits one row
// above the origin.

struct GaussianLabel {
  RealGrid y;
  double sigma = 0.0;  // cells
};

struct CropMask {
  RealGrid p;             // entries in {0, 1}
  int target_rows = 0;    // sides of the (padded) nonzero rectangle
  int target_cols = 0;
  int nonzeros = 0;       // L
  bool clipped = false;   // padded rectangle did not fit and was clipped
};

struct SpatialRegularizer {
  RealGrid g;  // strictly positive
};

struct RegularizerParams {
  double g_min = 0.1;
  double g_slope = 3.0;
};

/// Pooling kernels tiling the mask and the within-kernel index pairs whose
/// filter weights are tied: w(first) == w(second).
struct ConstraintPairSet {
  int rows = 0;
  int cols = 0;
  int kernel_rows = 1;  // e, or 1 along a singleton axis
  int kernel_cols = 1;
  std::vector<std::pair<int, int>> pairs;  // row-major linear cell indices
  std::vector<std::vector<int>> kernels;   // member cells of each kernel

  int size() const { return static_cast<int>(pairs.size()); }
  bool empty() const { return pairs.empty(); }
};

/// y(m,n) = exp(-(m~^2 + n~^2) / (2 sigma^2)), sigma = sigma_factor * sqrt(h w).
GaussianLabel build_label(int rows, int cols, int target_rows, int target_cols,
                          double sigma_factor = 0.1);

/// Rectangle of ones centered on the origin, each side rounded up to a
/// multiple of the kernel size along that axis. A side that would exceed the
/// grid is clipped to the largest fitting multiple and `clipped` is set.
CropMask build_mask(int rows, int cols, int target_rows, int target_cols, int e);

/// g = g_min + g_slope ((m~/h)^2 + (n~/w)^2).
SpatialRegularizer build_regularizer(int rows, int cols, int target_rows, int target_cols,
                                     const RegularizerParams& params = {});

/// Disjoint kernels anchored at the top-left corner of the mask rectangle;
/// all unordered pairs inside each kernel. For a one-row grid the kernel is
/// 1 x e, so K = C(e, 2) * L / e.
ConstraintPairSet build_constraint_pairs(const CropMask& mask, int e);

/// Closed-form pair count for a 1-D mask with L nonzeros and kernel e:
/// C(e, 2) * (floor((L - e) / e) + 1).
long long pair_count_1d(int nonzeros, int e);

/// out[k] = w(first_k) - w(second_k).
std::vector<double> pair_differences(const ConstraintPairSet& pairs, const RealGrid& w);

/// Adjoint scatter: +z[k] at first_k, -z[k] at second_k.
RealGrid pair_differences_adjoint(const ConstraintPairSet& pairs, std::span<const double> z);

/// Largest |w(i) - w(j)| over all pairs, divided by (max|w| + 1e-12).
double relative_pair_discrepancy(const ConstraintPairSet& pairs, const RealGrid& w);

/// Pooled-space response of a kernel-constant filter: for every circular
/// shift of `x`, the ROI under the mask is cropped, each kernel is averaged
/// (U v / e^2) and dotted with the pooled weights (e^2 times the shared
/// kernel value). Computed directly, without transforms.
RealGrid roi_pooled_response(const ConstraintPairSet& pairs, const CropMask& mask,
                             const RealGrid& w, const RealGrid& x);

}  // namespace rpcf
