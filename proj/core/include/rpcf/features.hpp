#pragma once

#include <array>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rpcf/image.hpp"
#include "rpcf/spectral.hpp"

namespace rpcf {

/// Which penalty (gamma_1 vs gamma_2) a channel group receives in training.
enum class PenaltyGroup { High, Low };

struct ChannelGroup {
  std::string name;
  int begin = 0;
  int count = 0;
  PenaltyGroup penalty = PenaltyGroup::Low;
};

/// D real channels on a common H x W cell grid.
struct FeatureStack {
  std::vector<RealGrid> channels;
  int cell_size = 4;
  std::vector<ChannelGroup> groups;

  int depth() const { return static_cast<int>(channels.size()); }
  Eigen::Index rows() const { return channels.empty() ? 0 : channels.front().rows(); }
  Eigen::Index cols() const { return channels.empty() ? 0 : channels.front().cols(); }
  const ChannelGroup* group(const std::string& name) const;
  /// Penalty group of every channel, in channel order.
  std::vector<PenaltyGroup> channel_penalties() const;
  /// Throws std::invalid_argument when dims differ, groups do not partition
  /// the channels, or a value is non-finite.
  void validate() const;
};

struct PcaGroup {
  std::string name;
  Eigen::MatrixXd basis;        // raw_dims x kept_dims, orthonormal columns
  Eigen::VectorXd eigenvalues;  // all raw_dims eigenvalues, descending
  bool rank_deficient = false;  // a kept direction carries (numerically) no variance
};

struct PcaProjection {
  std::vector<PcaGroup> groups;

  const PcaGroup* group(const std::string& name) const;
  /// Fraction of the group's covariance trace captured by the kept directions.
  double captured_variance_fraction(const std::string& name) const;
};

class ColorNameTable {
 public:
  static constexpr int kEntries = 32768;
  static constexpr int kNames = 11;
  static constexpr std::array<const char*, kNames> kNameLabels = {
      "black", "blue", "brown", "grey", "green", "orange", "pink", "purple", "red", "white", "yellow"};

  /// Reads kEntries x kNames little-endian float32, row index
  /// (r >> 3) << 10 | (g >> 3) << 5 | (b >> 3). Throws ConfigError if
  /// the file is missing or truncated.
  static ColorNameTable load(const std::filesystem::path& path);
  /// Locates the asset: explicit path, then $RPCF_COLORNAMES, then the build
  /// and install locations.
  static ColorNameTable load_default(const std::filesystem::path& explicit_path = {});
  /// Deterministic table built by soft-assigning each quantized color to 11
  /// prototype colors in CIELab space.
  static ColorNameTable generate();

  void save(const std::filesystem::path& path) const;

  static int index(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    return ((r >> 3) << 10) | ((g >> 3) << 5) | (b >> 3);
  }
  const float* row(std::uint8_t r, std::uint8_t g, std::uint8_t b) const {
    return &table_[static_cast<size_t>(index(r, g, b)) * kNames];
  }
  const std::vector<float>& data() const { return table_; }

 private:
  std::vector<float> table_;
};

enum class FeaturePooling { None, Average, Max };

struct FeatureConfig {
  int cell_size = 4;
  int kept_dims_hog = 10;
  int kept_dims_cn = 3;
  double search_area_factor = 5.0;  // search side = factor * sqrt(target area)
  double area_min = 200.0 * 200.0;  // bounds on the canonical search area, px^2
  double area_max = 250.0 * 250.0;
  FeaturePooling pooling = FeaturePooling::None;
  int pool_factor = 2;
  std::filesystem::path colornames_path;
};

/// Felzenszwalb-style 31-channel HOG (18 signed + 9 unsigned orientation
/// channels, 4 gradient-energy channels). Patches whose sides are not a
/// multiple of cell_size are padded by edge replication.
std::vector<RealGrid> compute_hog(const Image& patch, int cell_size = 4);

/// Raw per-cell gradient-magnitude histograms over 18 signed orientation bins
/// (bin o centered at o * 20 degrees, hard orientation assignment), before
/// block normalization. Each pixel votes bilinearly into the four nearest
/// cell centers. Exposed for inspection and testing.
std::vector<RealGrid> hog_cell_histograms(const Image& patch, int cell_size = 4);

/// 11 color-name probabilities averaged over each cell.
std::vector<RealGrid> compute_colornames(const Image& patch, const ColorNameTable& table,
                                         int cell_size = 4);

/// Mean intensity per cell, shifted to [-0.5, 0.5].
RealGrid compute_intensity(const Image& patch, int cell_size = 4);

/// Un-projected stack: HOG (low) + color names (high) for color patches,
/// HOG (low) + intensity (low) for gray ones.
FeatureStack compute_raw_features(const Image& patch, const FeatureConfig& config,
                                  const ColorNameTable* table);

/// Per-group eigenbasis of the channel covariance over all cells of all
/// samples. kept_dims maps group name to kept dimensionality; groups not
/// listed keep every channel.
PcaProjection fit_pca(const std::vector<FeatureStack>& samples,
                      const std::vector<std::pair<std::string, int>>& kept_dims);

FeatureStack project(const FeatureStack& stack, const PcaProjection& projection);

/// e x e pooling of every channel (average or max); trailing cells that do
/// not fill a kernel are dropped.
FeatureStack pool_features(const FeatureStack& stack, FeaturePooling mode, int factor);

RealGrid resample_bilinear(const RealGrid& in, Eigen::Index rows, Eigen::Index cols);

/// Separable raised-cosine window, zero on the border rows/cols.
RealGrid hann_window(Eigen::Index rows, Eigen::Index cols);

/// Per-group gains giving the stack unit total energy, each group holding a
/// share proportional to its channel count. Empty groups get gain 1.
std::vector<double> group_energy_gains(const FeatureStack& stack);
void apply_group_gains(FeatureStack& stack, const std::vector<double>& gains);

/// compute_raw_features -> project -> optional pooling -> resample to
/// (rows, cols) -> Hann window -> group gains. Without `gains` the stack's own
/// group_energy_gains are used. rows/cols <= 0 keeps the native grid.
FeatureStack build_feature_stack(const Image& patch, const FeatureConfig& config,
                                 const ColorNameTable* table, const PcaProjection& projection,
                                 Eigen::Index rows = 0, Eigen::Index cols = 0,
                                 const std::vector<double>* gains = nullptr);

}  // namespace rpcf
