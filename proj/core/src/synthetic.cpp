#include "rpcf/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <stdexcept>

namespace rpcf {
namespace {

constexpr double kPi = std::numbers::pi;

struct Grating {
  double fx, fy, phase, amp;
};

// Smooth pseudo-random texture: a handful of oriented gratings per channel.
struct Texture {
  std::vector<Grating> g[3];
  double base[3];

  Texture(std::mt19937_64& rng, double min_period, double max_period, int count) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int c = 0; c < 3; ++c) {
      base[c] = 60.0 + 130.0 * uni(rng);
      for (int k = 0; k < count; ++k) {
        const double period = min_period + (max_period - min_period) * uni(rng);
        const double theta = kPi * uni(rng);
        g[c].push_back({std::cos(theta) / period, std::sin(theta) / period, 2.0 * kPi * uni(rng),
                        (25.0 + 35.0 * uni(rng)) / std::sqrt(static_cast<double>(count))});
      }
    }
  }

  double at(int c, double x, double y) const {
    double v = base[c];
    for (const Grating& gr : g[c]) v += gr.amp * std::sin(2.0 * kPi * (gr.fx * x + gr.fy * y) + gr.phase);
    return v;
  }
};

std::uint8_t to_byte(double v) { return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0))); }

Point2 path_center(const SyntheticSpec& s, int t) {
  const double wob = s.wobble * std::sin(2.0 * kPi * t / 37.0);
  const double wob2 = s.wobble * std::sin(2.0 * kPi * t / 23.0 + 1.0);
  return {s.start_x + s.vx * t + wob, s.start_y + s.vy * t + wob2};
}

}  // namespace

BBox synthetic_box(const SyntheticSpec& spec, int t) {
  return BBox::from_center(path_center(spec, t), {spec.target_w, spec.target_h});
}

Sequence make_synthetic_sequence(const SyntheticSpec& spec) {
  if (spec.width < 8 || spec.height < 8 || spec.frames < 1 || !(spec.target_w > 0) || !(spec.target_h > 0))
    throw std::invalid_argument("make_synthetic_sequence: bad geometry");
  std::mt19937_64 rng(spec.seed);
  const Texture background(rng, 12.0, 60.0, 6);
  const Texture target(rng, 8.0, 20.0, 5);
  std::normal_distribution<double> noise(0.0, spec.noise);

  // The camera is static: render the background once.
  std::vector<double> bg(static_cast<size_t>(spec.width) * spec.height * 3);
  for (int y = 0; y < spec.height; ++y)
    for (int x = 0; x < spec.width; ++x)
      for (int ch = 0; ch < 3; ++ch)
        bg[(static_cast<size_t>(y) * spec.width + x) * 3 + ch] = background.at(ch, x + 0.5, y + 0.5);

  Sequence seq;
  seq.name = spec.name;
  const double a = 0.5 * spec.target_w, b = 0.5 * spec.target_h;
  for (int t = 0; t < spec.frames; ++t) {
    const Point2 c = path_center(spec, t);
    const double phase = 2.0 * kPi * t / 20.0;
    // Non-rigid warp: a bending shear plus a breathing aspect ratio.
    const double shear = 0.25 * spec.deformation * a;
    const double stretch = 1.0 + 0.2 * spec.deformation * std::sin(phase);
    const double reach = 1.5 * (a + b) + shear + 2.0;

    Image img(spec.width, spec.height, spec.color ? 3 : 1);
    for (int y = 0; y < spec.height; ++y)
      for (int x = 0; x < spec.width; ++x) {
        const double px = x + 0.5, py = y + 0.5;
        const double* back = &bg[(static_cast<size_t>(y) * spec.width + x) * 3];
        double rgb[3] = {back[0], back[1], back[2]};
        if (std::abs(px - c.x) < reach && std::abs(py - c.y) < reach) {
          double v = py - c.y;
          double u = px - c.x;
          u -= shear * std::sin(kPi * v / b + phase);
          u *= stretch;
          v /= stretch;
          const double ua = (u / a) * (u / a), vb = (v / b) * (v / b);
          const double r = ua * ua + vb * vb;
          // Soft superellipse edge, about one pixel wide.
          const double alpha = std::clamp((1.0 - r) * 0.25 * std::min(a, b), 0.0, 1.0);
          if (alpha > 0.0)
            for (int ch = 0; ch < 3; ++ch) rgb[ch] = alpha * target.at(ch, u, v) + (1.0 - alpha) * rgb[ch];
        }
        if (spec.color) {
          for (int ch = 0; ch < 3; ++ch) img.at(y, x, ch) = to_byte(rgb[ch] + noise(rng));
        } else {
          img.at(y, x) = to_byte(0.299 * rgb[0] + 0.587 * rgb[1] + 0.114 * rgb[2] + noise(rng));
        }
      }
    seq.frames.push_back(std::move(img));
    seq.ground_truth.push_back(synthetic_box(spec, t));
  }
  seq.attributes.push_back(spec.deformation > 0.0 ? "DEF" : "IPR");
  return seq;
}

SyntheticSpec translating_spec() {
  SyntheticSpec s;
  s.name = "translate";
  s.width = 400;
  s.height = 300;
  s.frames = 100;
  s.start_x = 90.0;
  s.start_y = 80.0;
  s.vx = 1.6;
  s.vy = 1.2;
  s.seed = 7;
  return s;
}

std::vector<SyntheticSpec> deformation_sweep(const std::vector<double>& amplitudes, int frames) {
  std::vector<SyntheticSpec> out;
  for (size_t i = 0; i < amplitudes.size(); ++i) {
    SyntheticSpec s;
    char name[32];
    std::snprintf(name, sizeof name, "deform_%02d", static_cast<int>(std::lround(amplitudes[i] * 100)));
    s.name = name;
    s.width = 320;
    s.height = 240;
    s.frames = frames;
    s.start_x = 100.0;
    s.start_y = 100.0;
    s.vx = 1.5;
    s.vy = 0.5;
    s.wobble = 6.0;
    s.deformation = amplitudes[i];
    s.seed = 100 + i;
    out.push_back(s);
  }
  return out;
}

void write_sequence(const Sequence& sequence, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "img");
  std::ofstream gt(dir / "groundtruth_rect.txt");
  if (!gt) throw std::runtime_error("cannot write " + (dir / "groundtruth_rect.txt").string());
  char buf[128];
  for (size_t i = 0; i < sequence.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%04zu.png", i + 1);
    save_image(sequence.frame(i), dir / "img" / buf);
    const BBox& b = sequence.ground_truth[i];
    std::snprintf(buf, sizeof buf, "%.3f,%.3f,%.3f,%.3f\n", b.x + 1.0, b.y + 1.0, b.w, b.h);
    gt << buf;
  }
  if (!sequence.attributes.empty()) {
    std::ofstream attr(dir / "attributes.txt");
    for (size_t i = 0; i < sequence.attributes.size(); ++i) attr << (i ? "," : "") << sequence.attributes[i];
    attr << "\n";
  }
}

}  // namespace rpcf
