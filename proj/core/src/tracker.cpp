#include "rpcf/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace rpcf {
namespace {

int effective_cell(const TrackerConfig& c) {
  return c.features.cell_size * (c.features.pooling == FeaturePooling::None ? 1 : c.features.pool_factor);
}

Image prepare_frame(const TrackerState& state, const Image& image) {
  if (image.empty()) throw std::invalid_argument("tracker: empty frame");
  if (!state.color && image.channels == 3) return to_gray(image);
  if (state.color && image.channels != 3)
    throw std::invalid_argument("tracker: gray frame in a color sequence");
  return image;
}

Point2 clamp_to_frame(Point2 c, int width, int height) {
  return {std::clamp(c.x, 0.0, static_cast<double>(width)),
          std::clamp(c.y, 0.0, static_cast<double>(height))};
}

}  // namespace

Image to_gray(const Image& image) {
  if (image.channels == 1) return image;
  Image out(image.width, image.height, 1);
  for (int y = 0; y < image.height; ++y)
    for (int x = 0; x < image.width; ++x) {
      const double v = 0.299 * image.at(y, x, 0) + 0.587 * image.at(y, x, 1) + 0.114 * image.at(y, x, 2);
      out.at(y, x) = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
    }
  return out;
}

BBox TrackerState::box() const {
  const Size2 size{target_size.width * scale, target_size.height * scale};
  BBox b = BBox::from_center(center, size);
  if (frame_width <= 0 || frame_height <= 0) return b;
  // Keep the emitted box inside the frame.
  b.w = std::min(b.w, static_cast<double>(frame_width));
  b.h = std::min(b.h, static_cast<double>(frame_height));
  b.x = std::clamp(b.x, 0.0, frame_width - b.w);
  b.y = std::clamp(b.y, 0.0, frame_height - b.h);
  return b;
}

FeatureStack extract_features(const TrackerState& state, const Image& image, Point2 center,
                              double scale) {
  const Image patch = extract_patch(image, center,
                                    {state.search_side, state.search_side}, scale,
                                    state.patch_side, state.patch_side);
  return build_feature_stack(patch, state.config.features, state.color ? state.table.get() : nullptr,
                             state.projection, state.rows, state.cols, &state.group_gains);
}

MultiSpectrum sample_spectra(const FeatureStack& stack) {
  MultiSpectrum out;
  out.reserve(stack.channels.size());
  const int dr = -static_cast<int>(stack.rows() / 2);
  const int dc = -static_cast<int>(stack.cols() / 2);
  for (const auto& ch : stack.channels) out.push_back(spectral::forward(spectral::circshift(ch, dr, dc)));
  return out;
}

RealGrid response_map(const MultiSpectrum& sample_hat, const SpectralFilter& filter) {
  return spectral::inverse(response_spectrum(sample_hat, filter));
}

TrackerState tracker_init(const Image& image, const BBox& box, const TrackerConfig& config,
                          std::shared_ptr<const ColorNameTable> table) {
  config.validate();
  if (image.empty()) throw std::invalid_argument("tracker_init: empty image");
  if (!(box.w > 0.0) || !(box.h > 0.0)) throw std::invalid_argument("tracker_init: degenerate box");
  if (box.w > image.width || box.h > image.height || box.x + box.w <= 0.0 || box.y + box.h <= 0.0 ||
      box.x >= image.width || box.y >= image.height) {
    std::ostringstream msg;
    msg << "tracker_init: box (" << box.x << ", " << box.y << ", " << box.w << ", " << box.h
        << ") does not fit the " << image.width << "x" << image.height << " image";
    throw std::invalid_argument(msg.str());
  }

  TrackerState s;
  s.config = config;
  s.memory = SampleMemory(config.memory);
  s.color = image.channels == 3 && !is_effectively_gray(image);
  if (s.color) s.table = table ? table : std::make_shared<const ColorNameTable>(
                                             ColorNameTable::load_default(config.features.colornames_path));
  s.center = box.center();
  s.target_size = {box.w, box.h};
  s.frame_width = image.width;
  s.frame_height = image.height;
  for (int i = 0; i < config.num_scales; ++i)
    s.scale_factors.push_back(std::pow(config.scale_step, i - (config.num_scales - 1) / 2.0));

  // Square search region, resampled to a canonical patch whose area lies in
  // [area_min, area_max]. The side is an even number of cells, or a multiple
  // of the pooling factor, so pooling divides the grid exactly.
  s.search_side = config.features.search_area_factor * std::sqrt(box.w * box.h);
  const bool pooled = config.features.pooling != FeaturePooling::None;
  const int unit = config.features.cell_size * (pooled ? std::max(2, config.features.pool_factor) : 2);
  const double side = std::clamp(s.search_side, std::sqrt(config.features.area_min),
                                 std::sqrt(config.features.area_max));
  s.patch_side = std::max(unit, static_cast<int>(std::lround(side / unit)) * unit);
  s.cell_px = effective_cell(config) * s.search_side / s.patch_side;

  const Image frame = prepare_frame(s, image);
  const Image patch = extract_patch(frame, s.center,
                                    {s.search_side, s.search_side}, 1.0, s.patch_side, s.patch_side);
  const FeatureStack raw = compute_raw_features(patch, config.features, s.table.get());
  s.projection = fit_pca({raw}, {{"hog", config.features.kept_dims_hog}, {"cn", config.features.kept_dims_cn}});
  const std::vector<double> unit_gains(s.projection.groups.size(), 1.0);
  FeatureStack stack =
      build_feature_stack(patch, config.features, s.table.get(), s.projection, 0, 0, &unit_gains);
  s.group_gains = group_energy_gains(stack);
  apply_group_gains(stack, s.group_gains);
  s.rows = static_cast<int>(stack.rows());
  s.cols = static_cast<int>(stack.cols());

  const int tr = std::max(1, static_cast<int>(std::lround(box.h / s.cell_px)));
  const int tc = std::max(1, static_cast<int>(std::lround(box.w / s.cell_px)));
  CropMask mask = build_mask(s.rows, s.cols, tr, tc, config.e);
  ConstraintPairSet pairs = build_constraint_pairs(mask, config.e);
  s.context = make_filter_context(std::move(mask), build_regularizer(s.rows, s.cols, tr, tc, config.regularizer),
                                  std::move(pairs), build_label(s.rows, s.cols, tr, tc, config.sigma_factor).y,
                                  stack.channel_penalties());

  s.memory.insert({sample_spectra(stack), 1.0, 1});
  const AdmmResult res = admm_solve(s.memory, s.context, config.solver, TrainingPhase::First);
  s.filter = res.filter;
  s.admm = res.state;
  s.last_trace = res.trace;
  s.first_frame_residual = res.constraint_residual;
  s.frame_index = 1;
  s.updated_last_step = true;
  return s;
}

std::vector<RealGrid> compute_responses(const TrackerState& state, const Image& image) {
  const Image frame = prepare_frame(state, image);
  std::vector<RealGrid> out;
  out.reserve(state.scale_factors.size());
  for (double f : state.scale_factors) {
    const double scale = std::clamp(state.scale * f, state.config.scale_min, state.config.scale_max);
    out.push_back(response_map(sample_spectra(extract_features(state, frame, state.center, scale)),
                               state.filter));
  }
  return out;
}

Localization localize(const TrackerState& state, const std::vector<RealGrid>& responses) {
  if (responses.empty()) throw std::invalid_argument("localize: no responses");
  if (responses.size() != state.scale_factors.size())
    throw std::invalid_argument("localize: one response per scale factor required");
  Localization best;
  best.center = state.center;
  best.scale = state.scale;
  best.degenerate = true;
  std::vector<spectral::Peak> peaks;
  double top = -std::numeric_limits<double>::infinity();
  for (const auto& r : responses) {
    peaks.push_back(spectral::subpixel_peak(r, state.config.upsample, state.config.newton_iters));
    if (!peaks.back().degenerate) top = std::max(top, peaks.back().value);
  }
  // Among peaks tied with the best (within scale_tie_tol), the smallest scale
  // change wins; equal changes fall back to the larger peak.
  const double floor = top - state.config.scale_tie_tol * std::abs(top);
  for (size_t i = 0; i < peaks.size(); ++i) {
    const spectral::Peak& p = peaks[i];
    if (p.degenerate || p.value < floor) continue;
    bool better = best.scale_index < 0;
    if (!better) {
      const double change = std::abs(std::log(state.scale_factors[i]));
      const double best_change = std::abs(std::log(state.scale_factors[static_cast<size_t>(best.scale_index)]));
      better = change < best_change || (change == best_change && p.value > best.peak.value);
    }
    if (better) {
      best.scale_index = static_cast<int>(i);
      best.peak = p;
      best.degenerate = false;
    }
  }
  if (best.degenerate) return best;

  const double scale = std::clamp(state.scale * state.scale_factors[static_cast<size_t>(best.scale_index)],
                                  state.config.scale_min, state.config.scale_max);
  const double step = state.cell_px * scale;
  best.scale = scale;
  best.center = {state.center.x + best.peak.dx * step, state.center.y + best.peak.dy * step};
  if (state.frame_width > 0 && state.frame_height > 0)
    best.center = clamp_to_frame(best.center, state.frame_width, state.frame_height);
  return best;
}

BBox tracker_step(TrackerState& state, const Image& image) {
  if (state.frame_index < 1) throw std::logic_error("tracker_step: tracker not initialized");
  const Image frame = prepare_frame(state, image);
  state.frame_width = frame.width;
  state.frame_height = frame.height;
  ++state.frame_index;

  const Localization loc = localize(state, compute_responses(state, frame));
  state.last_degenerate = loc.degenerate;
  state.center = loc.center;
  state.scale = loc.scale;

  const FeatureStack stack = extract_features(state, frame, state.center, state.scale);
  state.memory.insert({sample_spectra(stack), 0.0, state.frame_index});

  state.updated_last_step = false;
  if (state.memory.should_update(state.frame_index)) {
    try {
      AdmmResult res = admm_solve(state.memory, state.context, state.config.solver,
                                  TrainingPhase::Update, &state.filter, &state.admm);
      state.filter = std::move(res.filter);
      state.admm = std::move(res.state);
      state.last_trace = std::move(res.trace);
      state.updated_last_step = true;
    } catch (const NumericError&) {
      // Keep the previous model; the frame is flagged instead.
      state.last_degenerate = true;
    }
  }
  return state.box();
}

}  // namespace rpcf
