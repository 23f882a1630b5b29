#include "rpcf/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <tuple>

#include <fftw3.h>

namespace rpcf::spectral {
namespace {

// FFTW planning is not thread-safe; execution with the new-array interface is.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int rows, int cols, int sign) {
    std::lock_guard lock(mutex_);
    auto key = std::make_tuple(rows, cols, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<std::complex<double>> in(static_cast<size_t>(rows) * cols);
    std::vector<std::complex<double>> out(in.size());
    fftw_plan plan = fftw_plan_dft_2d(rows, cols, reinterpret_cast<fftw_complex*>(in.data()),
                                      reinterpret_cast<fftw_complex*>(out.data()), sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan == nullptr) throw NumericError("fftw planning failed");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

Spectrum transform(const Spectrum& in, int sign) {
  const auto rows = static_cast<int>(in.rows());
  const auto cols = static_cast<int>(in.cols());
  if (rows < 1 || cols < 1) throw NumericError("empty grid passed to the DFT");
  Spectrum out(in.rows(), in.cols());
  fftw_plan plan = plan_cache().get(rows, cols, sign);
  fftw_execute_dft(plan,
                   const_cast<fftw_complex*>(reinterpret_cast<const fftw_complex*>(in.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

void require_finite(const RealGrid& x) {
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      if (!std::isfinite(x(i, j))) {
        std::ostringstream msg;
        msg << "non-finite value at (" << i << ", " << j << ")";
        throw NumericError(msg.str());
      }
}

void require_same_dims(Eigen::Index r0, Eigen::Index c0, Eigen::Index r1, Eigen::Index c1) {
  if (r0 != r1 || c0 != c1) {
    std::ostringstream msg;
    msg << "dimension mismatch: " << r0 << "x" << c0 << " vs " << r1 << "x" << c1;
    throw NumericError(msg.str());
  }
}

int signed_freq(int k, int n) { return k <= n / 2 ? k : k - n; }

// Per-axis basis of the trigonometric interpolant and its first two
// derivatives. The Nyquist bin of an even axis is split symmetrically, which
// turns it into a cosine.
struct AxisBasis {
  std::vector<std::complex<double>> e, de, dde;
};

AxisBasis axis_basis(int n, double t) {
  AxisBasis b;
  b.e.resize(n);
  b.de.resize(n);
  b.dde.resize(n);
  for (int k = 0; k < n; ++k) {
    if (n % 2 == 0 && k == n / 2) {
      const double a = std::numbers::pi * t;
      b.e[k] = std::cos(a);
      b.de[k] = -std::numbers::pi * std::sin(a);
      b.dde[k] = -std::numbers::pi * std::numbers::pi * std::cos(a);
      continue;
    }
    const double omega = 2.0 * std::numbers::pi * signed_freq(k, n) / n;
    const std::complex<double> e = std::polar(1.0, omega * t);
    b.e[k] = e;
    b.de[k] = std::complex<double>(0.0, omega) * e;
    b.dde[k] = -omega * omega * e;
  }
  return b;
}

struct LocalModel {
  double f, fy, fx, fyy, fxx, fxy;
};

LocalModel local_model(const Spectrum& R, double y, double x) {
  const int H = static_cast<int>(R.rows());
  const int W = static_cast<int>(R.cols());
  const AxisBasis a = axis_basis(H, y);
  const AxisBasis b = axis_basis(W, x);
  LocalModel m{};
  for (int k = 0; k < H; ++k) {
    std::complex<double> c0, c1, c2;
    for (int l = 0; l < W; ++l) {
      const auto r = R(k, l);
      c0 += r * b.e[l];
      c1 += r * b.de[l];
      c2 += r * b.dde[l];
    }
    m.f += (a.e[k] * c0).real();
    m.fx += (a.e[k] * c1).real();
    m.fxx += (a.e[k] * c2).real();
    m.fy += (a.de[k] * c0).real();
    m.fyy += (a.dde[k] * c0).real();
    m.fxy += (a.de[k] * c1).real();
  }
  const double s = 1.0 / (static_cast<double>(H) * W);
  m.f *= s;
  m.fy *= s;
  m.fx *= s;
  m.fyy *= s;
  m.fxx *= s;
  m.fxy *= s;
  return m;
}

// Zero-padded spectrum of size (uH, uW) whose inverse samples the same
// interpolant on a grid `upsample` times finer.
Spectrum pad_spectrum(const Spectrum& R, int upsample) {
  const int H = static_cast<int>(R.rows());
  const int W = static_cast<int>(R.cols());
  const int UH = H * upsample;
  const int UW = W * upsample;
  Spectrum P = Spectrum::Zero(UH, UW);
  auto targets = [&](int k, int n, int un, int out[2], double wt[2]) {
    if (n % 2 == 0 && k == n / 2 && un != n) {
      out[0] = n / 2;
      out[1] = un - n / 2;
      wt[0] = wt[1] = 0.5;
      return 2;
    }
    const int s = signed_freq(k, n);
    out[0] = ((s % un) + un) % un;
    wt[0] = 1.0;
    return 1;
  };
  for (int k = 0; k < H; ++k) {
    int rk[2];
    double wk[2];
    const int nk = targets(k, H, UH, rk, wk);
    for (int l = 0; l < W; ++l) {
      int cl[2];
      double wl[2];
      const int nl = targets(l, W, UW, cl, wl);
      for (int i = 0; i < nk; ++i)
        for (int j = 0; j < nl; ++j) P(rk[i], cl[j]) += R(k, l) * (wk[i] * wl[j]);
    }
  }
  return P;
}

}  // namespace

Spectrum forward(const RealGrid& x) {
  require_finite(x);
  return transform(x.cast<std::complex<double>>(), FFTW_FORWARD);
}

Spectrum forward(const Spectrum& x) { return transform(x, FFTW_FORWARD); }

Spectrum inverse_complex(const Spectrum& X) {
  Spectrum out = transform(X, FFTW_BACKWARD);
  out /= static_cast<double>(X.size());
  return out;
}

double hermitian_defect(const Spectrum& X, Eigen::Index* bad_row, Eigen::Index* bad_col) {
  const Eigen::Index H = X.rows();
  const Eigen::Index W = X.cols();
  const double scale = X.abs().maxCoeff();
  if (scale == 0.0) return 0.0;
  double worst = 0.0;
  for (Eigen::Index u = 0; u < H; ++u) {
    const Eigen::Index mu = (H - u) % H;
    for (Eigen::Index v = 0; v < W; ++v) {
      const Eigen::Index mv = (W - v) % W;
      const double d = std::abs(X(u, v) - std::conj(X(mu, mv)));
      if (d > worst) {
        worst = d;
        if (bad_row) *bad_row = u;
        if (bad_col) *bad_col = v;
      }
    }
  }
  return worst / scale;
}

RealGrid inverse(const Spectrum& X, double rel_tol) {
  Eigen::Index br = 0, bc = 0;
  const double defect = hermitian_defect(X, &br, &bc);
  if (!(defect <= rel_tol)) {
    std::ostringstream msg;
    msg << "spectrum is not Hermitian-symmetric: relative defect " << defect << " at bin (" << br
        << ", " << bc << ")";
    throw NumericError(msg.str());
  }
  return inverse_complex(X).real();
}

RealGrid circular_convolve(const RealGrid& a, const RealGrid& b) {
  require_same_dims(a.rows(), a.cols(), b.rows(), b.cols());
  return spectral::inverse(Spectrum(forward(a) * forward(b)));
}

Spectrum mask_multiply(const RealGrid& m, const Spectrum& v) {
  require_same_dims(m.rows(), m.cols(), v.rows(), v.cols());
  Spectrum spatial = inverse_complex(v);
  spatial *= m.cast<std::complex<double>>();
  return forward(spatial);
}

RealGrid circshift(const RealGrid& in, int dr, int dc) {
  const Eigen::Index H = in.rows();
  const Eigen::Index W = in.cols();
  RealGrid out(H, W);
  for (Eigen::Index i = 0; i < H; ++i) {
    const Eigen::Index si = ((i - dr) % H + H) % H;
    for (Eigen::Index j = 0; j < W; ++j) out(i, j) = in(si, ((j - dc) % W + W) % W);
  }
  return out;
}

double interpolant_value(const Spectrum& R, double y, double x) { return local_model(R, y, x).f; }

Peak subpixel_peak(const RealGrid& r, int upsample, int newton_iters) {
  if (upsample < 1) throw NumericError("upsample factor must be >= 1");
  const int H = static_cast<int>(r.rows());
  const int W = static_cast<int>(r.cols());
  const Spectrum R = forward(r);

  const double hi = r.maxCoeff();
  const double lo = r.minCoeff();
  if (hi - lo <= 1e-12 * std::max(1.0, std::abs(hi))) {
    return Peak{0.0, 0.0, r(0, 0), true};
  }

  RealGrid fine;
  if (upsample == 1) {
    fine = r;
  } else {
    fine = inverse_complex(pad_spectrum(R, upsample)).real() *
           static_cast<double>(upsample) * static_cast<double>(upsample);
  }
  Eigen::Index bi = 0, bj = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < fine.rows(); ++i)
    for (Eigen::Index j = 0; j < fine.cols(); ++j)
      if (fine(i, j) > best) {
        best = fine(i, j);
        bi = i;
        bj = j;
      }
  double y = static_cast<double>(bi) / upsample;
  double x = static_cast<double>(bj) / upsample;
  // Grid samples are exact interpolant values; keep the better of the two so
  // the result never falls below the sampled maximum.
  Eigen::Index gi = 0, gj = 0;
  r.maxCoeff(&gi, &gj);
  LocalModel m = local_model(R, y, x);
  if (m.f < hi) {
    y = static_cast<double>(gi);
    x = static_cast<double>(gj);
    m = local_model(R, y, x);
  }

  const double max_step = 1.0 / upsample;
  for (int it = 0; it < newton_iters; ++it) {
    const double det = m.fyy * m.fxx - m.fxy * m.fxy;
    if (!(m.fyy < 0.0 && det > 0.0)) break;
    double sy = -(m.fxx * m.fy - m.fxy * m.fx) / det;
    double sx = -(-m.fxy * m.fy + m.fyy * m.fx) / det;
    const double len = std::hypot(sy, sx);
    if (len > max_step) {
      sy *= max_step / len;
      sx *= max_step / len;
    }
    const LocalModel next = local_model(R, y + sy, x + sx);
    if (next.f < m.f) break;
    y += sy;
    x += sx;
    m = next;
    if (std::hypot(sy, sx) < 1e-4) break;
  }
  return Peak{wrap_offset(y, H), wrap_offset(x, W), m.f, false};
}

}  // namespace rpcf::spectral
