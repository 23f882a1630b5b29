#include "rpcf/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rpcf {
namespace {

int wrap(int i, int n) { return ((i % n) + n) % n; }

int kernel_extent(int grid_side, int e) { return grid_side == 1 ? 1 : e; }

// First offset of a centered run of `side` cells.
int run_start(int side) { return -(side / 2); }

}  // namespace

GaussianLabel build_label(int rows, int cols, int target_rows, int target_cols,
                          double sigma_factor) {
  if (rows < 1 || cols < 1 || target_rows < 1 || target_cols < 1)
    throw std::invalid_argument("build_label: sizes must be positive");
  GaussianLabel label;
  label.sigma = sigma_factor * std::sqrt(static_cast<double>(target_rows) * target_cols);
  label.y.resize(rows, cols);
  const double inv = 1.0 / (2.0 * label.sigma * label.sigma);
  for (int m = 0; m < rows; ++m) {
    const double dm = spectral::wrap_offset(m, rows);
    for (int n = 0; n < cols; ++n) {
      const double dn = spectral::wrap_offset(n, cols);
      label.y(m, n) = std::exp(-(dm * dm + dn * dn) * inv);
    }
  }
  return label;
}

CropMask build_mask(int rows, int cols, int target_rows, int target_cols, int e) {
  if (rows < 1 || cols < 1 || target_rows < 1 || target_cols < 1 || e < 1)
    throw std::invalid_argument("build_mask: sizes must be positive");
  CropMask mask;
  auto padded_side = [&](int target, int grid) {
    const int k = kernel_extent(grid, e);
    int side = ((std::min(target, grid) + k - 1) / k) * k;
    if (target > grid || side > grid) {
      mask.clipped = true;
      side = std::max(k, (grid / k) * k);
    }
    return std::min(side, grid);
  };
  mask.target_rows = padded_side(target_rows, rows);
  mask.target_cols = padded_side(target_cols, cols);
  mask.nonzeros = mask.target_rows * mask.target_cols;
  mask.p = RealGrid::Zero(rows, cols);
  const int r0 = run_start(mask.target_rows);
  const int c0 = run_start(mask.target_cols);
  for (int i = 0; i < mask.target_rows; ++i)
    for (int j = 0; j < mask.target_cols; ++j) mask.p(wrap(r0 + i, rows), wrap(c0 + j, cols)) = 1.0;
  return mask;
}

SpatialRegularizer build_regularizer(int rows, int cols, int target_rows, int target_cols,
                                     const RegularizerParams& params) {
  if (rows < 1 || cols < 1 || target_rows < 1 || target_cols < 1)
    throw std::invalid_argument("build_regularizer: sizes must be positive");
  if (!(params.g_min > 0.0) || params.g_slope < 0.0)
    throw std::invalid_argument("build_regularizer: need g_min > 0 and g_slope >= 0");
  SpatialRegularizer reg;
  reg.g.resize(rows, cols);
  for (int m = 0; m < rows; ++m) {
    const double dm = spectral::wrap_offset(m, rows) / target_rows;
    for (int n = 0; n < cols; ++n) {
      const double dn = spectral::wrap_offset(n, cols) / target_cols;
      reg.g(m, n) = params.g_min + params.g_slope * (dm * dm + dn * dn);
    }
  }
  return reg;
}

ConstraintPairSet build_constraint_pairs(const CropMask& mask, int e) {
  if (e < 1) throw std::invalid_argument("build_constraint_pairs: e must be >= 1");
  ConstraintPairSet set;
  set.rows = static_cast<int>(mask.p.rows());
  set.cols = static_cast<int>(mask.p.cols());
  set.kernel_rows = kernel_extent(set.rows, e);
  set.kernel_cols = kernel_extent(set.cols, e);
  if (mask.target_rows % set.kernel_rows != 0 || mask.target_cols % set.kernel_cols != 0) {
    std::ostringstream msg;
    msg << "build_constraint_pairs: mask " << mask.target_rows << "x" << mask.target_cols
        << " is not divisible by kernel " << set.kernel_rows << "x" << set.kernel_cols;
    throw std::invalid_argument(msg.str());
  }
  const int r0 = run_start(mask.target_rows);
  const int c0 = run_start(mask.target_cols);
  for (int kr = 0; kr < mask.target_rows; kr += set.kernel_rows) {
    for (int kc = 0; kc < mask.target_cols; kc += set.kernel_cols) {
      std::vector<int> members;
      for (int i = 0; i < set.kernel_rows; ++i)
        for (int j = 0; j < set.kernel_cols; ++j)
          members.push_back(wrap(r0 + kr + i, set.rows) * set.cols + wrap(c0 + kc + j, set.cols));
      for (size_t a = 0; a < members.size(); ++a)
        for (size_t b = a + 1; b < members.size(); ++b) set.pairs.emplace_back(members[a], members[b]);
      set.kernels.push_back(std::move(members));
    }
  }
  return set;
}

long long pair_count_1d(int nonzeros, int e) {
  if (e < 2) return 0;
  const long long choose2 = static_cast<long long>(e) * (e - 1) / 2;
  return choose2 * ((nonzeros - e) / e + 1);
}

std::vector<double> pair_differences(const ConstraintPairSet& pairs, const RealGrid& w) {
  std::vector<double> out(pairs.pairs.size());
  const double* data = w.data();
  for (size_t k = 0; k < pairs.pairs.size(); ++k)
    out[k] = data[pairs.pairs[k].first] - data[pairs.pairs[k].second];
  return out;
}

RealGrid pair_differences_adjoint(const ConstraintPairSet& pairs, std::span<const double> z) {
  if (z.size() != pairs.pairs.size())
    throw std::invalid_argument("pair_differences_adjoint: length mismatch");
  RealGrid out = RealGrid::Zero(pairs.rows, pairs.cols);
  double* data = out.data();
  for (size_t k = 0; k < z.size(); ++k) {
    data[pairs.pairs[k].first] += z[k];
    data[pairs.pairs[k].second] -= z[k];
  }
  return out;
}

double relative_pair_discrepancy(const ConstraintPairSet& pairs, const RealGrid& w) {
  double worst = 0.0;
  for (double d : pair_differences(pairs, w)) worst = std::max(worst, std::abs(d));
  return worst / (w.abs().maxCoeff() + 1e-12);
}

RealGrid roi_pooled_response(const ConstraintPairSet& pairs, const CropMask& mask,
                             const RealGrid& w, const RealGrid& x) {
  const int H = pairs.rows;
  const int W = pairs.cols;
  if (x.rows() != H || x.cols() != W || w.rows() != H || w.cols() != W || mask.p.rows() != H ||
      mask.p.cols() != W)
    throw std::invalid_argument("roi_pooled_response: dimension mismatch");

  // Pooled weights: one per kernel, e^2 times the shared value.
  std::vector<double> pooled_w;
  for (const auto& kernel : pairs.kernels)
    pooled_w.push_back(static_cast<double>(kernel.size()) * w.data()[kernel.front()]);

  RealGrid r = RealGrid::Zero(H, W);
  const double* xd = x.data();
  for (int m = 0; m < H; ++m) {
    for (int n = 0; n < W; ++n) {
      double acc = 0.0;
      for (size_t j = 0; j < pairs.kernels.size(); ++j) {
        // ROI crop of the shifted sample, then kernel mean.
        double mean = 0.0;
        for (int cell : pairs.kernels[j]) {
          const int k = cell / W, l = cell % W;
          mean += xd[wrap(m - k, H) * W + wrap(n - l, W)];
        }
        mean /= static_cast<double>(pairs.kernels[j].size());
        acc += pooled_w[j] * mean;
      }
      r(m, n) = acc;
    }
  }
  return r;
}

}  // namespace rpcf
