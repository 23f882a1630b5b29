#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "rpcf/features.hpp"

namespace rpcf {
namespace {

constexpr int kOrients = 9;
constexpr double kEps = 1e-4;
constexpr double kTruncate = 0.2;

struct Directions {
  std::array<double, kOrients> u{}, v{};
  Directions() {
    for (int o = 0; o < kOrients; ++o) {
      u[o] = std::cos(o * std::numbers::pi / kOrients);
      v[o] = std::sin(o * std::numbers::pi / kOrients);
    }
  }
};

int clampi(int v, int lo, int hi) { return std::max(lo, std::min(v, hi)); }

double pixel(const Image& img, int y, int x, int c) {
  return img.at(clampi(y, 0, img.height - 1), clampi(x, 0, img.width - 1), c);
}

}  // namespace

std::vector<RealGrid> hog_cell_histograms(const Image& patch, int cell_size) {
  if (patch.empty()) throw std::invalid_argument("compute_hog: empty patch");
  if (cell_size < 1) throw std::invalid_argument("compute_hog: cell_size must be >= 1");
  static const Directions dirs;
  const int ch = (patch.height + cell_size - 1) / cell_size;
  const int cw = (patch.width + cell_size - 1) / cell_size;
  std::vector<RealGrid> hist(2 * kOrients, RealGrid::Zero(ch, cw));

  // Pixels beyond the patch replicate the edge, so padding rows/cols are
  // iterated as if they existed.
  for (int y = 0; y < ch * cell_size; ++y) {
    for (int x = 0; x < cw * cell_size; ++x) {
      double best_dx = 0.0, best_dy = 0.0, best_mag2 = -1.0;
      for (int c = 0; c < patch.channels; ++c) {
        const double dx = (pixel(patch, y, x + 1, c) - pixel(patch, y, x - 1, c)) / 255.0;
        const double dy = (pixel(patch, y + 1, x, c) - pixel(patch, y - 1, x, c)) / 255.0;
        const double m2 = dx * dx + dy * dy;
        if (m2 > best_mag2) {
          best_mag2 = m2;
          best_dx = dx;
          best_dy = dy;
        }
      }
      if (best_mag2 <= 0.0) continue;
      double best_dot = 0.0;
      int bin = 0;
      for (int o = 0; o < kOrients; ++o) {
        const double dot = dirs.u[o] * best_dx + dirs.v[o] * best_dy;
        if (dot > best_dot) {
          best_dot = dot;
          bin = o;
        } else if (-dot > best_dot) {
          best_dot = -dot;
          bin = o + kOrients;
        }
      }
      // Bilinear vote into the four nearest cell centers.
      const double mag = std::sqrt(best_mag2);
      const double yp = (y + 0.5) / cell_size - 0.5;
      const double xp = (x + 0.5) / cell_size - 0.5;
      const int iy = static_cast<int>(std::floor(yp));
      const int ix = static_cast<int>(std::floor(xp));
      const double fy = yp - iy, fx = xp - ix;
      const int cys[2] = {iy, iy + 1};
      const int cxs[2] = {ix, ix + 1};
      const double wys[2] = {1.0 - fy, fy};
      const double wxs[2] = {1.0 - fx, fx};
      for (int a = 0; a < 2; ++a) {
        if (cys[a] < 0 || cys[a] >= ch) continue;
        for (int b = 0; b < 2; ++b) {
          if (cxs[b] < 0 || cxs[b] >= cw) continue;
          hist[bin](cys[a], cxs[b]) += wys[a] * wxs[b] * mag;
        }
      }
    }
  }
  return hist;
}

std::vector<RealGrid> compute_hog(const Image& patch, int cell_size) {
  const std::vector<RealGrid> hist = hog_cell_histograms(patch, cell_size);
  const Eigen::Index ch = hist[0].rows();
  const Eigen::Index cw = hist[0].cols();

  RealGrid energy = RealGrid::Zero(ch, cw);
  for (int o = 0; o < kOrients; ++o) energy += (hist[o] + hist[o + kOrients]).square();

  auto e = [&](Eigen::Index i, Eigen::Index j) {
    return energy(std::clamp<Eigen::Index>(i, 0, ch - 1), std::clamp<Eigen::Index>(j, 0, cw - 1));
  };

  std::vector<RealGrid> out(31, RealGrid::Zero(ch, cw));
  for (Eigen::Index i = 0; i < ch; ++i) {
    for (Eigen::Index j = 0; j < cw; ++j) {
      // Four 2x2 blocks that contain cell (i, j).
      std::array<double, 4> n{};
      int k = 0;
      for (int di : {-1, 0})
        for (int dj : {-1, 0}) {
          const double s = e(i + di, j + dj) + e(i + di + 1, j + dj) + e(i + di, j + dj + 1) +
                           e(i + di + 1, j + dj + 1);
          n[k++] = 1.0 / std::sqrt(s + kEps);
        }
      std::array<double, 4> texture{};
      for (int o = 0; o < 2 * kOrients; ++o) {
        double acc = 0.0;
        for (int b = 0; b < 4; ++b) {
          const double h = std::min(hist[o](i, j) * n[b], kTruncate);
          acc += h;
          texture[b] += h;
        }
        out[o](i, j) = 0.5 * acc;
      }
      for (int o = 0; o < kOrients; ++o) {
        const double sum = hist[o](i, j) + hist[o + kOrients](i, j);
        double acc = 0.0;
        for (int b = 0; b < 4; ++b) acc += std::min(sum * n[b], kTruncate);
        out[2 * kOrients + o](i, j) = 0.5 * acc;
      }
      for (int b = 0; b < 4; ++b) out[3 * kOrients + b](i, j) = 0.2357 * texture[b];
    }
  }
  return out;
}

}  // namespace rpcf
