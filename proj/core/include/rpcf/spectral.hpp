#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rpcf/errors.hpp"

namespace rpcf {

/// Real-valued 2-D grid, row-major (rows = H cells, cols = W cells).
using RealGrid = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
/// Full (unpacked) complex 2-D spectrum, same layout as RealGrid.
using Spectrum = Eigen::Array<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using MultiGrid = std::vector<RealGrid>;
using MultiSpectrum = std::vector<Spectrum>;

namespace spectral {

// Convention: unnormalized forward DFT, 1/(HW) on the inverse, so
// ||x||^2 == ||forward(x)||^2 / (H W).

Spectrum forward(const RealGrid& x);
Spectrum forward(const Spectrum& x);

/// Inverse DFT of a spectrum that must be Hermitian-symmetric within
/// `rel_tol` of its largest magnitude. Throws NumericError naming the first
/// offending bin otherwise.
RealGrid inverse(const Spectrum& X, double rel_tol = 1e-6);

/// Inverse DFT without the real-output requirement.
Spectrum inverse_complex(const Spectrum& X);

/// Largest |X(u,v) - conj(X(-u,-v))| relative to max|X|; 0 for a zero spectrum.
double hermitian_defect(const Spectrum& X, Eigen::Index* bad_row = nullptr,
                        Eigen::Index* bad_col = nullptr);

/// (a * b)(m,n) = sum_{p,q} a(p,q) b((m-p) mod H, (n-q) mod W).
RealGrid circular_convolve(const RealGrid& a, const RealGrid& b);

/// forward(m .* inverse(v)): the action of the Toeplitz matrix built from the
/// spectrum of `m`, without forming it.
Spectrum mask_multiply(const RealGrid& m, const Spectrum& v);

/// Signed offset of index i on a ring of n cells, in (-n/2, n/2].
inline double wrap_offset(double i, int n) {
  double r = i - n * static_cast<double>(static_cast<long long>(i / n));
  if (r < 0) r += n;
  if (r > n / 2.0) r -= n;
  return r;
}

/// Circular shift: out(m,n) = in((m - dr) mod H, (n - dc) mod W).
RealGrid circshift(const RealGrid& in, int dr, int dc);

struct Peak {
  double dy = 0.0;  // rows, wrapped to (-H/2, H/2]
  double dx = 0.0;  // cols, wrapped to (-W/2, W/2]
  double value = 0.0;
  bool degenerate = false;
};

/// Maximum of the trigonometric interpolant of `r`: coarse search on a grid
/// upsampled by `upsample` (zero-padded spectrum), then Newton steps on the
/// interpolant until the step falls below 1e-4 cells.
Peak subpixel_peak(const RealGrid& r, int upsample = 4, int newton_iters = 5);

/// Value of the trigonometric interpolant of the grid with spectrum R at
/// fractional position (y, x).
double interpolant_value(const Spectrum& R, double y, double x);

}  // namespace spectral
}  // namespace rpcf
