#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <vector>

namespace rpcf {

/// 8-bit raster, interleaved channels (1 = gray, 3 = RGB), row-major.
struct Image {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<std::uint8_t> data;

  Image() = default;
  Image(int w, int h, int c) : width(w), height(h), channels(c), data(static_cast<size_t>(w) * h * c, 0) {}

  bool empty() const { return width <= 0 || height <= 0 || data.empty(); }
  bool is_color() const { return channels == 3; }

  std::uint8_t& at(int y, int x, int c = 0) {
    return data[(static_cast<size_t>(y) * width + x) * channels + c];
  }
  std::uint8_t at(int y, int x, int c = 0) const {
    return data[(static_cast<size_t>(y) * width + x) * channels + c];
  }
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct Size2 {
  double width = 0.0;
  double height = 0.0;
};

/// Crop a region of `size * scale` pixels centered on `center` and resample it
/// bilinearly to `out_width x out_height`. Sample positions align the region
/// corners with the output corners; pixels outside the frame replicate the
/// nearest edge.
Image extract_patch(const Image& image, Point2 center, Size2 size, double scale, int out_width,
                    int out_height);

/// Decode an image file (any format the codec backend handles). Gray files
/// stay single-channel; color files are returned as RGB.
Image load_image(const std::filesystem::path& path);
void save_image(const Image& image, const std::filesystem::path& path);

/// True when all three channels agree at every pixel.
bool is_effectively_gray(const Image& image);

}  // namespace rpcf
