#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "rpcf/constraints.hpp"
#include "rpcf/features.hpp"
#include "rpcf/memory.hpp"
#include "rpcf/solver.hpp"

namespace rpcf {

enum class Variant { Baseline, FeatureMapAvgPool, FeatureMapMaxPool, Rpcf };

struct TrackerConfig {
  FeatureConfig features;
  int e = 2;  // pooling kernel size
  RegularizerParams regularizer;
  double sigma_factor = 0.1;
  SolverConfig solver;
  MemoryConfig memory;
  int num_scales = 5;
  double scale_step = 1.02;
  double scale_min = 0.2;  // relative to the first-frame target size
  double scale_max = 5.0;
  double scale_tie_tol = 0.03;  // peaks within this relative margin count as tied
  int upsample = 4;
  int newton_iters = 5;
  Variant variant = Variant::Rpcf;

  /// Checks ranges; throws ConfigError naming the offending key.
  void validate() const;
};

const char* variant_name(Variant v);
/// Accepts baseline, feature_map_avg_pool, feature_map_max_pool, rpcf.
Variant parse_variant(const std::string& name);
std::vector<Variant> all_variants();

/// Copy of `base` adjusted for an ablation variant: baseline drops the
/// constraints (e = 1), the feature-map variants pool features e x e before
/// training instead, rpcf keeps everything.
TrackerConfig apply_variant(TrackerConfig base, Variant v);

/// Sets one key from its text value. Throws ConfigError for unknown keys or
/// malformed values.
void set_config_value(TrackerConfig& config, const std::string& key, const std::string& value);

/// Flat `key = value` lines; `#` starts a comment. Errors carry the line number.
TrackerConfig parse_config(const std::string& text, TrackerConfig base = {});
TrackerConfig load_config(const std::filesystem::path& path, TrackerConfig base = {});

/// Every settable key with its current value, in a stable order.
std::vector<std::pair<std::string, std::string>> config_entries(const TrackerConfig& config);
std::string format_config(const TrackerConfig& config);

}  // namespace rpcf
