#pragma once

#include <memory>
#include <vector>

#include "rpcf/config.hpp"
#include "rpcf/features.hpp"
#include "rpcf/image.hpp"
#include "rpcf/memory.hpp"
#include "rpcf/solver.hpp"

namespace rpcf {

/// Axis-aligned box, top-left corner (0-indexed pixels) plus size.
struct BBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  Point2 center() const { return {x + w / 2.0, y + h / 2.0}; }
  static BBox from_center(Point2 c, Size2 s) {
    return {c.x - s.width / 2.0, c.y - s.height / 2.0, s.width, s.height};
  }
};

struct TrackerState {
  TrackerConfig config;
  std::shared_ptr<const ColorNameTable> table;  // null for gray sequences

  Point2 center;      // continuous pixel coordinates (pixel i spans [i, i+1))
  Size2 target_size;  // first-frame box size; the current size is target_size * scale
  double scale = 1.0;
  std::vector<double> scale_factors;  // relative search scales, ascending

  // Search geometry at scale 1.
  double search_side = 0.0;  // image pixels
  int patch_side = 0;        // canonical pixels
  double cell_px = 0.0;      // image pixels per filter cell
  int rows = 0;
  int cols = 0;
  bool color = true;
  int frame_width = 0;
  int frame_height = 0;

  PcaProjection projection;
  std::vector<double> group_gains;  // feature normalization, fixed at init
  FilterContext context;
  SpectralFilter filter;
  AdmmState admm;
  SampleMemory memory;
  int frame_index = 0;  // 1 after init

  double first_frame_residual = 0.0;  // relative constraint residual after init
  AdmmTrace last_trace;               // of the most recent solve
  bool last_degenerate = false;       // localization held the previous center
  bool updated_last_step = false;

  BBox box() const;
};

/// First-frame training. Throws std::invalid_argument for a degenerate box or
/// one that does not fit the image, ConfigError for a bad config or missing
/// color-name table.
TrackerState tracker_init(const Image& image, const BBox& box, const TrackerConfig& config,
                          std::shared_ptr<const ColorNameTable> table = nullptr);

/// Windowed feature stack at `center` and absolute `scale`, on the filter grid.
FeatureStack extract_features(const TrackerState& state, const Image& image, Point2 center,
                              double scale);

/// Spectra of a stack after moving the patch center onto the origin cell.
MultiSpectrum sample_spectra(const FeatureStack& stack);

/// Real response map inverse(sum_d z_d . w_d).
RealGrid response_map(const MultiSpectrum& sample_hat, const SpectralFilter& filter);

/// One response per entry of state.scale_factors.
std::vector<RealGrid> compute_responses(const TrackerState& state, const Image& image);

struct Localization {
  Point2 center;
  double scale = 1.0;
  int scale_index = -1;   // -1 when degenerate
  spectral::Peak peak;
  bool degenerate = false;
};

/// Best scale by interpolated peak value, where peaks within scale_tie_tol of
/// the maximum count as tied and ties go to the smaller scale change; the
/// sub-cell offset is converted to pixels and the center clamped to the frame.
Localization localize(const TrackerState& state, const std::vector<RealGrid>& responses);

/// Localize, insert a training sample at the new estimate and retrain when
/// the update schedule says so. Returns the emitted box. Never throws on
/// low-confidence frames; last_degenerate is set instead.
BBox tracker_step(TrackerState& state, const Image& image);

/// Single-channel copy (ITU-R BT.601 luma) of a color image.
Image to_gray(const Image& image);

}  // namespace rpcf
