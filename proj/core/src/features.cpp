#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "rpcf/features.hpp"

namespace rpcf {

const ChannelGroup* FeatureStack::group(const std::string& name) const {
  for (const auto& g : groups)
    if (g.name == name) return &g;
  return nullptr;
}

std::vector<PenaltyGroup> FeatureStack::channel_penalties() const {
  std::vector<PenaltyGroup> out(channels.size(), PenaltyGroup::Low);
  for (const auto& g : groups)
    for (int c = g.begin; c < g.begin + g.count; ++c) out[c] = g.penalty;
  return out;
}

void FeatureStack::validate() const {
  int covered = 0;
  for (const auto& g : groups) {
    if (g.begin != covered || g.count < 0)
      throw std::invalid_argument("feature groups must partition the channels in order");
    covered += g.count;
  }
  if (covered != depth()) throw std::invalid_argument("feature groups do not cover every channel");
  for (const auto& c : channels) {
    if (c.rows() != rows() || c.cols() != cols())
      throw std::invalid_argument("feature channels differ in size");
    if (!c.allFinite()) throw std::invalid_argument("feature channel has non-finite values");
  }
}

const PcaGroup* PcaProjection::group(const std::string& name) const {
  for (const auto& g : groups)
    if (g.name == name) return &g;
  return nullptr;
}

double PcaProjection::captured_variance_fraction(const std::string& name) const {
  const PcaGroup* g = group(name);
  if (g == nullptr) throw std::invalid_argument("unknown PCA group: " + name);
  const double total = g->eigenvalues.sum();
  if (total <= 0.0) return 1.0;
  return g->eigenvalues.head(g->basis.cols()).sum() / total;
}

std::vector<RealGrid> compute_colornames(const Image& patch, const ColorNameTable& table,
                                         int cell_size) {
  if (!patch.is_color()) throw std::invalid_argument("compute_colornames: color patch required");
  const int ch = (patch.height + cell_size - 1) / cell_size;
  const int cw = (patch.width + cell_size - 1) / cell_size;
  std::vector<RealGrid> out(ColorNameTable::kNames, RealGrid::Zero(ch, cw));
  const double inv = 1.0 / (cell_size * cell_size);
  for (int y = 0; y < ch * cell_size; ++y) {
    const int sy = std::min(y, patch.height - 1);
    for (int x = 0; x < cw * cell_size; ++x) {
      const int sx = std::min(x, patch.width - 1);
      const float* row = table.row(patch.at(sy, sx, 0), patch.at(sy, sx, 1), patch.at(sy, sx, 2));
      for (int c = 0; c < ColorNameTable::kNames; ++c) out[c](y / cell_size, x / cell_size) += row[c] * inv;
    }
  }
  return out;
}

RealGrid compute_intensity(const Image& patch, int cell_size) {
  const int ch = (patch.height + cell_size - 1) / cell_size;
  const int cw = (patch.width + cell_size - 1) / cell_size;
  RealGrid out = RealGrid::Zero(ch, cw);
  const double inv = 1.0 / (cell_size * cell_size * patch.channels * 255.0);
  for (int y = 0; y < ch * cell_size; ++y) {
    const int sy = std::min(y, patch.height - 1);
    for (int x = 0; x < cw * cell_size; ++x) {
      const int sx = std::min(x, patch.width - 1);
      double v = 0.0;
      for (int c = 0; c < patch.channels; ++c) v += patch.at(sy, sx, c);
      out(y / cell_size, x / cell_size) += v * inv;
    }
  }
  return out - 0.5;
}

FeatureStack compute_raw_features(const Image& patch, const FeatureConfig& config,
                                  const ColorNameTable* table) {
  FeatureStack s;
  s.cell_size = config.cell_size;
  s.channels = compute_hog(patch, config.cell_size);
  s.groups.push_back({"hog", 0, static_cast<int>(s.channels.size()), PenaltyGroup::Low});
  if (patch.is_color()) {
    if (table == nullptr) throw ConfigError("color patch requires a color-name table");
    auto cn = compute_colornames(patch, *table, config.cell_size);
    s.groups.push_back({"cn", s.depth(), static_cast<int>(cn.size()), PenaltyGroup::High});
    for (auto& c : cn) s.channels.push_back(std::move(c));
  } else {
    s.groups.push_back({"gray", s.depth(), 1, PenaltyGroup::Low});
    s.channels.push_back(compute_intensity(patch, config.cell_size));
  }
  return s;
}

PcaProjection fit_pca(const std::vector<FeatureStack>& samples,
                      const std::vector<std::pair<std::string, int>>& kept_dims) {
  if (samples.empty()) throw std::invalid_argument("fit_pca: no samples");
  PcaProjection proj;
  for (const auto& g : samples.front().groups) {
    int kept = g.count;
    for (const auto& [name, k] : kept_dims)
      if (name == g.name) kept = k;
    if (kept < 1 || kept > g.count) {
      std::ostringstream msg;
      msg << "fit_pca: kept_dims " << kept << " invalid for group '" << g.name << "' with "
          << g.count << " channels";
      throw std::invalid_argument(msg.str());
    }

    Eigen::Index n = 0;
    for (const auto& s : samples) n += s.rows() * s.cols();
    Eigen::MatrixXd X(n, g.count);
    Eigen::Index row = 0;
    for (const auto& s : samples) {
      const ChannelGroup* sg = s.group(g.name);
      if (sg == nullptr || sg->count != g.count)
        throw std::invalid_argument("fit_pca: samples disagree on group '" + g.name + "'");
      const Eigen::Index cells = s.rows() * s.cols();
      for (int c = 0; c < g.count; ++c)
        X.block(row, c, cells, 1) = Eigen::Map<const Eigen::VectorXd>(s.channels[sg->begin + c].data(), cells);
      row += cells;
    }
    const Eigen::RowVectorXd mean = X.colwise().mean();
    X.rowwise() -= mean;
    const Eigen::MatrixXd cov = (X.transpose() * X) / static_cast<double>(n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    // Eigen returns ascending order.
    const Eigen::VectorXd values = eig.eigenvalues().reverse();
    Eigen::MatrixXd vectors = eig.eigenvectors().rowwise().reverse();
    for (Eigen::Index k = 0; k < vectors.cols(); ++k) {
      Eigen::Index arg = 0;
      vectors.col(k).cwiseAbs().maxCoeff(&arg);
      if (vectors(arg, k) < 0) vectors.col(k) = -vectors.col(k);
    }
    PcaGroup pg;
    pg.name = g.name;
    pg.eigenvalues = values.cwiseMax(0.0);
    pg.basis = vectors.leftCols(kept);
    const double floor = 1e-12 * std::max(values.maxCoeff(), std::numeric_limits<double>::min());
    pg.rank_deficient = values(kept - 1) <= floor;
    proj.groups.push_back(std::move(pg));
  }
  return proj;
}

FeatureStack project(const FeatureStack& stack, const PcaProjection& projection) {
  FeatureStack out;
  out.cell_size = stack.cell_size;
  for (const auto& g : stack.groups) {
    const PcaGroup* pg = projection.group(g.name);
    if (pg == nullptr) throw std::invalid_argument("project: no basis for group '" + g.name + "'");
    if (pg->basis.rows() != g.count)
      throw std::invalid_argument("project: basis size mismatch for group '" + g.name + "'");
    const int kept = static_cast<int>(pg->basis.cols());
    out.groups.push_back({g.name, out.depth(), kept, g.penalty});
    for (int k = 0; k < kept; ++k) {
      RealGrid acc = RealGrid::Zero(stack.rows(), stack.cols());
      for (int c = 0; c < g.count; ++c) {
        const double b = pg->basis(c, k);
        if (b != 0.0) acc += b * stack.channels[g.begin + c];
      }
      out.channels.push_back(std::move(acc));
    }
  }
  return out;
}

FeatureStack pool_features(const FeatureStack& stack, FeaturePooling mode, int factor) {
  if (mode == FeaturePooling::None || factor <= 1) return stack;
  const Eigen::Index pr = stack.rows() / factor;
  const Eigen::Index pc = stack.cols() / factor;
  if (pr < 1 || pc < 1) throw std::invalid_argument("pool_features: grid smaller than kernel");
  FeatureStack out = stack;
  out.cell_size = stack.cell_size * factor;
  for (auto& ch : out.channels) {
    RealGrid pooled(pr, pc);
    for (Eigen::Index i = 0; i < pr; ++i)
      for (Eigen::Index j = 0; j < pc; ++j) {
        const auto block = ch.block(i * factor, j * factor, factor, factor);
        pooled(i, j) = mode == FeaturePooling::Max ? block.maxCoeff() : block.mean();
      }
    ch = std::move(pooled);
  }
  return out;
}

RealGrid resample_bilinear(const RealGrid& in, Eigen::Index rows, Eigen::Index cols) {
  if (rows == in.rows() && cols == in.cols()) return in;
  RealGrid out(rows, cols);
  const double sy = rows > 1 ? (in.rows() - 1.0) / (rows - 1.0) : 0.0;
  const double sx = cols > 1 ? (in.cols() - 1.0) / (cols - 1.0) : 0.0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double py = i * sy;
    const Eigen::Index y0 = static_cast<Eigen::Index>(std::floor(py));
    const Eigen::Index y1 = std::min(y0 + 1, in.rows() - 1);
    const double fy = py - y0;
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double px = j * sx;
      const Eigen::Index x0 = static_cast<Eigen::Index>(std::floor(px));
      const Eigen::Index x1 = std::min(x0 + 1, in.cols() - 1);
      const double fx = px - x0;
      out(i, j) = (1 - fy) * ((1 - fx) * in(y0, x0) + fx * in(y0, x1)) +
                  fy * ((1 - fx) * in(y1, x0) + fx * in(y1, x1));
    }
  }
  return out;
}

RealGrid hann_window(Eigen::Index rows, Eigen::Index cols) {
  auto axis = [](Eigen::Index n) {
    Eigen::ArrayXd w = Eigen::ArrayXd::Ones(n);
    if (n > 1)
      for (Eigen::Index i = 0; i < n; ++i)
        w(i) = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * i / (n - 1.0)));
    return w;
  };
  const Eigen::ArrayXd wr = axis(rows);
  const Eigen::ArrayXd wc = axis(cols);
  RealGrid out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) out.row(i) = wr(i) * wc.transpose();
  return out;
}

std::vector<double> group_energy_gains(const FeatureStack& stack) {
  std::vector<double> gains;
  const double depth = stack.depth();
  for (const auto& g : stack.groups) {
    double energy = 0.0;
    for (int c = g.begin; c < g.begin + g.count; ++c) energy += stack.channels[c].square().sum();
    gains.push_back(energy > 0.0 ? std::sqrt((g.count / depth) / energy) : 1.0);
  }
  return gains;
}

void apply_group_gains(FeatureStack& stack, const std::vector<double>& gains) {
  if (gains.size() != stack.groups.size())
    throw std::invalid_argument("apply_group_gains: one gain per group required");
  for (size_t k = 0; k < gains.size(); ++k) {
    const auto& g = stack.groups[k];
    for (int c = g.begin; c < g.begin + g.count; ++c) stack.channels[c] *= gains[k];
  }
}

FeatureStack build_feature_stack(const Image& patch, const FeatureConfig& config,
                                 const ColorNameTable* table, const PcaProjection& projection,
                                 Eigen::Index rows, Eigen::Index cols,
                                 const std::vector<double>* gains) {
  FeatureStack s = project(compute_raw_features(patch, config, table), projection);
  s = pool_features(s, config.pooling, config.pool_factor);
  if (rows <= 0 || cols <= 0) {
    rows = s.rows();
    cols = s.cols();
  }
  const RealGrid window = hann_window(rows, cols);
  for (auto& ch : s.channels) ch = resample_bilinear(ch, rows, cols) * window;
  apply_group_gains(s, gains ? *gains : group_energy_gains(s));
  s.validate();
  return s;
}

}  // namespace rpcf
