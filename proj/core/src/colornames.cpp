#include <array>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <algorithm>

#include "rpcf/features.hpp"

namespace rpcf {
namespace {

static_assert(std::endian::native == std::endian::little, "asset loader assumes little-endian host");

struct Lab {
  double l, a, b;
};

double srgb_to_linear(double c) {
  c /= 255.0;
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double lab_f(double t) {
  constexpr double d = 6.0 / 29.0;
  return t > d * d * d ? std::cbrt(t) : t / (3 * d * d) + 4.0 / 29.0;
}

Lab to_lab(double r, double g, double b) {
  const double R = srgb_to_linear(r), G = srgb_to_linear(g), B = srgb_to_linear(b);
  const double X = 0.4124564 * R + 0.3575761 * G + 0.1804375 * B;
  const double Y = 0.2126729 * R + 0.7151522 * G + 0.0721750 * B;
  const double Z = 0.0193339 * R + 0.1191920 * G + 0.9503041 * B;
  const double fx = lab_f(X / 0.95047), fy = lab_f(Y / 1.0), fz = lab_f(Z / 1.08883);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

// Prototype colors in the order of ColorNameTable::kNameLabels.
constexpr std::array<std::array<double, 3>, ColorNameTable::kNames> kPrototypes = {{
    {0, 0, 0},        // black
    {0, 0, 255},      // blue
    {139, 69, 19},    // brown
    {128, 128, 128},  // grey
    {0, 160, 0},      // green
    {255, 140, 0},    // orange
    {255, 160, 200},  // pink
    {128, 0, 128},    // purple
    {255, 0, 0},      // red
    {255, 255, 255},  // white
    {255, 255, 0},    // yellow
}};

constexpr double kTemperature = 14.0;  // Lab units

}  // namespace

ColorNameTable ColorNameTable::generate() {
  std::array<Lab, kNames> protos;
  for (int c = 0; c < kNames; ++c)
    protos[c] = to_lab(kPrototypes[c][0], kPrototypes[c][1], kPrototypes[c][2]);

  ColorNameTable t;
  t.table_.resize(static_cast<size_t>(kEntries) * kNames);
  for (int idx = 0; idx < kEntries; ++idx) {
    const double r = ((idx >> 10) & 31) * 8 + 4;
    const double g = ((idx >> 5) & 31) * 8 + 4;
    const double b = (idx & 31) * 8 + 4;
    const Lab p = to_lab(r, g, b);
    std::array<double, kNames> d2{};
    double dmin = std::numeric_limits<double>::infinity();
    for (int c = 0; c < kNames; ++c) {
      const double dl = p.l - protos[c].l, da = p.a - protos[c].a, db = p.b - protos[c].b;
      d2[c] = dl * dl + da * da + db * db;
      dmin = std::min(dmin, d2[c]);
    }
    double sum = 0.0;
    for (int c = 0; c < kNames; ++c) {
      d2[c] = std::exp(-(d2[c] - dmin) / (2.0 * kTemperature * kTemperature));
      sum += d2[c];
    }
    for (int c = 0; c < kNames; ++c)
      t.table_[static_cast<size_t>(idx) * kNames + c] = static_cast<float>(d2[c] / sum);
  }
  return t;
}

ColorNameTable ColorNameTable::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("color-name table not found: " + path.string());
  ColorNameTable t;
  t.table_.resize(static_cast<size_t>(kEntries) * kNames);
  in.read(reinterpret_cast<char*>(t.table_.data()),
          static_cast<std::streamsize>(t.table_.size() * sizeof(float)));
  if (in.gcount() != static_cast<std::streamsize>(t.table_.size() * sizeof(float)))
    throw ConfigError("color-name table truncated: " + path.string());
  for (float v : t.table_)
    if (!std::isfinite(v)) throw ConfigError("color-name table has non-finite entries");
  return t;
}

ColorNameTable ColorNameTable::load_default(const std::filesystem::path& explicit_path) {
  if (!explicit_path.empty()) return load(explicit_path);
  if (const char* env = std::getenv("RPCF_COLORNAMES"); env != nullptr && *env != '\0')
    return load(env);
#ifdef RPCF_COLORNAMES_BUILD_PATH
  if (std::filesystem::exists(RPCF_COLORNAMES_BUILD_PATH)) return load(RPCF_COLORNAMES_BUILD_PATH);
#endif
#ifdef RPCF_COLORNAMES_INSTALL_PATH
  if (std::filesystem::exists(RPCF_COLORNAMES_INSTALL_PATH))
    return load(RPCF_COLORNAMES_INSTALL_PATH);
#endif
  throw ConfigError("color-name table asset not found; set colornames_path or RPCF_COLORNAMES");
}

void ColorNameTable::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write color-name table: " + path.string());
  out.write(reinterpret_cast<const char*>(table_.data()),
            static_cast<std::streamsize>(table_.size() * sizeof(float)));
}

}  // namespace rpcf
