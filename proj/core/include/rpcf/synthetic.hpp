#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rpcf/bench.hpp"

namespace rpcf {

/// A textured target moving over a textured static background.
struct SyntheticSpec {
  std::string name = "synthetic";
  int width = 320;
  int height = 240;
  int frames = 100;
  double target_w = 40.0;
  double target_h = 32.0;
  double start_x = 80.0;  // target center, pixels
  double start_y = 80.0;
  double vx = 1.6;  // pixels per frame
  double vy = 1.2;
  double wobble = 0.0;       // amplitude (px) of a sinusoidal path perturbation
  double deformation = 0.0;  // 0 = rigid; 1 = strong non-rigid warp and aspect change
  double noise = 2.0;        // std of additive pixel noise, gray levels
  bool color = true;
  std::uint64_t seed = 1;
};

Sequence make_synthetic_sequence(const SyntheticSpec& spec);

/// Ground-truth box of frame `t` (0-based).
BBox synthetic_box(const SyntheticSpec& spec, int t);

/// The in-tree translating sequence: 2 px/frame, 100 frames.
SyntheticSpec translating_spec();

/// Sequences with increasing deformation amplitude.
std::vector<SyntheticSpec> deformation_sweep(const std::vector<double>& amplitudes = {0.0, 0.3, 0.6, 0.9},
                                             int frames = 60);

/// Writes the OTB layout: img/0001.png ... and groundtruth_rect.txt (1-indexed).
void write_sequence(const Sequence& sequence, const std::filesystem::path& dir);

}  // namespace rpcf
