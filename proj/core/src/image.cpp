#include "rpcf/image.hpp"

#include <algorithm>
#include <cmath>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

namespace rpcf {

Image extract_patch(const Image& image, Point2 center, Size2 size, double scale, int out_width,
                    int out_height) {
  if (image.empty()) throw std::invalid_argument("extract_patch: empty image");
  if (!(size.width > 0 && size.height > 0 && scale > 0))
    throw std::invalid_argument("extract_patch: size and scale must be positive");
  if (out_width < 1 || out_height < 1) throw std::invalid_argument("extract_patch: empty output");

  const double rw = size.width * scale;
  const double rh = size.height * scale;
  const double left = center.x - rw / 2.0;
  const double top = center.y - rh / 2.0;
  const double sx = out_width > 1 ? (rw - 1.0) / (out_width - 1) : 0.0;
  const double sy = out_height > 1 ? (rh - 1.0) / (out_height - 1) : 0.0;

  Image out(out_width, out_height, image.channels);
  std::vector<int> x0(out_width), x1(out_width);
  std::vector<double> fx(out_width);
  for (int j = 0; j < out_width; ++j) {
    const double px = std::clamp(left + j * sx, 0.0, image.width - 1.0);
    x0[j] = static_cast<int>(std::floor(px));
    x1[j] = std::min(x0[j] + 1, image.width - 1);
    fx[j] = px - x0[j];
  }
  for (int i = 0; i < out_height; ++i) {
    const double py = std::clamp(top + i * sy, 0.0, image.height - 1.0);
    const int y0 = static_cast<int>(std::floor(py));
    const int y1 = std::min(y0 + 1, image.height - 1);
    const double fy = py - y0;
    for (int j = 0; j < out_width; ++j) {
      for (int c = 0; c < image.channels; ++c) {
        const double top_v = (1 - fx[j]) * image.at(y0, x0[j], c) + fx[j] * image.at(y0, x1[j], c);
        const double bot_v = (1 - fx[j]) * image.at(y1, x0[j], c) + fx[j] * image.at(y1, x1[j], c);
        const double v = (1 - fy) * top_v + fy * bot_v;
        out.at(i, j, c) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
      }
    }
  }
  return out;
}

Image load_image(const std::filesystem::path& path) {
  cv::Mat m = cv::imread(path.string(), cv::IMREAD_ANYCOLOR);
  if (m.empty()) throw std::runtime_error("cannot read image: " + path.string());
  Image img(m.cols, m.rows, m.channels() == 1 ? 1 : 3);
  for (int y = 0; y < m.rows; ++y) {
    const auto* row = m.ptr<std::uint8_t>(y);
    for (int x = 0; x < m.cols; ++x) {
      if (img.channels == 1) {
        img.at(y, x) = row[x];
      } else {
        img.at(y, x, 0) = row[3 * x + 2];
        img.at(y, x, 1) = row[3 * x + 1];
        img.at(y, x, 2) = row[3 * x + 0];
      }
    }
  }
  return img;
}

void save_image(const Image& image, const std::filesystem::path& path) {
  cv::Mat m(image.height, image.width, image.channels == 1 ? CV_8UC1 : CV_8UC3);
  for (int y = 0; y < image.height; ++y) {
    auto* row = m.ptr<std::uint8_t>(y);
    for (int x = 0; x < image.width; ++x) {
      if (image.channels == 1) {
        row[x] = image.at(y, x);
      } else {
        row[3 * x + 0] = image.at(y, x, 2);
        row[3 * x + 1] = image.at(y, x, 1);
        row[3 * x + 2] = image.at(y, x, 0);
      }
    }
  }
  if (!cv::imwrite(path.string(), m)) throw std::runtime_error("cannot write image: " + path.string());
}

bool is_effectively_gray(const Image& image) {
  if (image.channels == 1) return true;
  for (int y = 0; y < image.height; ++y)
    for (int x = 0; x < image.width; ++x)
      if (image.at(y, x, 0) != image.at(y, x, 1) || image.at(y, x, 1) != image.at(y, x, 2))
        return false;
  return true;
}

}  // namespace rpcf
