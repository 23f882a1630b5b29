#include "rpcf/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "rpcf/errors.hpp"

namespace rpcf {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

int to_int(const std::string& key, const std::string& v) {
  int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError("config key '" + key + "': expected an integer, got '" + v + "'");
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError("config key '" + key + "': expected a number, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config key '" + key + "': expected true/false, got '" + v + "'");
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

const char* pooling_name(FeaturePooling p) {
  switch (p) {
    case FeaturePooling::Average: return "avg";
    case FeaturePooling::Max: return "max";
    default: return "none";
  }
}

struct Key {
  const char* name;
  std::function<void(TrackerConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const TrackerConfig&)> get;
};

#define RPCF_INT(k, field)                                                                   \
  Key{k, [](TrackerConfig& c, const std::string& n, const std::string& v) { c.field = to_int(n, v); }, \
      [](const TrackerConfig& c) { return std::to_string(c.field); }}
#define RPCF_DBL(k, field)                                                                      \
  Key{k, [](TrackerConfig& c, const std::string& n, const std::string& v) { c.field = to_double(n, v); }, \
      [](const TrackerConfig& c) { return fmt(c.field); }}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      RPCF_INT("cell_size", features.cell_size),
      RPCF_INT("kept_dims_hog", features.kept_dims_hog),
      RPCF_INT("kept_dims_cn", features.kept_dims_cn),
      RPCF_DBL("search_area_factor", features.search_area_factor),
      RPCF_DBL("area_min", features.area_min),
      RPCF_DBL("area_max", features.area_max),
      Key{"pooling",
          [](TrackerConfig& c, const std::string& n, const std::string& v) {
            if (v == "none") c.features.pooling = FeaturePooling::None;
            else if (v == "avg") c.features.pooling = FeaturePooling::Average;
            else if (v == "max") c.features.pooling = FeaturePooling::Max;
            else throw ConfigError("config key '" + n + "': expected none/avg/max, got '" + v + "'");
          },
          [](const TrackerConfig& c) { return std::string(pooling_name(c.features.pooling)); }},
      RPCF_INT("pool_factor", features.pool_factor),
      Key{"colornames_path",
          [](TrackerConfig& c, const std::string&, const std::string& v) { c.features.colornames_path = v; },
          [](const TrackerConfig& c) { return c.features.colornames_path.string(); }},
      RPCF_INT("e", e),
      RPCF_DBL("g_min", regularizer.g_min),
      RPCF_DBL("g_slope", regularizer.g_slope),
      RPCF_DBL("sigma_factor", sigma_factor),
      RPCF_DBL("lambda", solver.lambda),
      RPCF_DBL("gamma1", solver.gamma1),
      RPCF_DBL("gamma_ratio", solver.gamma_ratio),
      RPCF_DBL("gamma_max", solver.gamma_max),
      RPCF_DBL("alpha", solver.alpha),
      Key{"admm_iters",
          [](TrackerConfig& c, const std::string& n, const std::string& v) {
            c.solver.admm_iters_first = c.solver.admm_iters_update = to_int(n, v);
          },
          nullptr},
      RPCF_INT("admm_iters_first", solver.admm_iters_first),
      RPCF_INT("admm_iters_update", solver.admm_iters_update),
      RPCF_INT("cg_budget_first", solver.cg_budget_first),
      RPCF_INT("cg_budget_update", solver.cg_budget_update),
      RPCF_DBL("cg_tol", solver.cg_tol),
      Key{"reset_multipliers",
          [](TrackerConfig& c, const std::string& n, const std::string& v) {
            c.solver.reset_multipliers = to_bool(n, v);
          },
          [](const TrackerConfig& c) { return std::string(c.solver.reset_multipliers ? "true" : "false"); }},
      RPCF_DBL("divergence_factor", solver.divergence_factor),
      RPCF_INT("T", memory.capacity),
      RPCF_DBL("omega", memory.omega),
      RPCF_INT("N_t", memory.update_interval),
      RPCF_INT("num_scales", num_scales),
      RPCF_DBL("scale_step", scale_step),
      RPCF_DBL("scale_min", scale_min),
      RPCF_DBL("scale_max", scale_max),
      RPCF_DBL("scale_tie_tol", scale_tie_tol),
      RPCF_INT("upsample", upsample),
      RPCF_INT("newton_iters", newton_iters),
      Key{"variant",
          [](TrackerConfig& c, const std::string&, const std::string& v) { c.variant = parse_variant(v); },
          [](const TrackerConfig& c) { return std::string(variant_name(c.variant)); }},
  };
  return table;
}

#undef RPCF_INT
#undef RPCF_DBL

void require(bool ok, const char* key, const char* what) {
  if (!ok) throw ConfigError(std::string("config key '") + key + "': " + what);
}

}  // namespace

void TrackerConfig::validate() const {
  require(features.cell_size >= 1, "cell_size", "must be >= 1");
  require(features.kept_dims_hog >= 1 && features.kept_dims_hog <= 31, "kept_dims_hog", "must lie in [1, 31]");
  require(features.kept_dims_cn >= 1 && features.kept_dims_cn <= 11, "kept_dims_cn", "must lie in [1, 11]");
  require(features.search_area_factor > 0.0, "search_area_factor", "must be positive");
  require(features.area_min > 0.0 && features.area_max >= features.area_min, "area_max",
          "need 0 < area_min <= area_max");
  require(features.pool_factor >= 1, "pool_factor", "must be >= 1");
  require(e >= 1, "e", "must be >= 1");
  require(regularizer.g_min > 0.0, "g_min", "must be positive");
  require(regularizer.g_slope >= 0.0, "g_slope", "must be >= 0");
  require(sigma_factor > 0.0, "sigma_factor", "must be positive");
  require(solver.lambda >= 0.0, "lambda", "must be >= 0");
  require(solver.gamma1 > 0.0, "gamma1", "must be positive");
  require(solver.gamma_ratio > 0.0, "gamma_ratio", "must be positive");
  require(solver.gamma_max >= solver.gamma1, "gamma_max", "must be >= gamma1");
  require(solver.alpha >= 1.0, "alpha", "must be >= 1");
  require(solver.admm_iters_first >= 1, "admm_iters_first", "must be >= 1");
  require(solver.admm_iters_update >= 1, "admm_iters_update", "must be >= 1");
  require(solver.cg_budget_first >= 0, "cg_budget_first", "must be >= 0");
  require(solver.cg_budget_update >= 0, "cg_budget_update", "must be >= 0");
  require(solver.cg_tol >= 0.0, "cg_tol", "must be >= 0");
  require(solver.divergence_factor > 1.0, "divergence_factor", "must be > 1");
  require(memory.capacity >= 1, "T", "must be >= 1");
  require(memory.omega > 0.0 && memory.omega <= 1.0, "omega", "must lie in (0, 1]");
  require(memory.update_interval >= 1, "N_t", "must be >= 1");
  require(num_scales >= 1, "num_scales", "must be >= 1");
  require(scale_step >= 1.0, "scale_step", "must be >= 1");
  require(scale_min > 0.0 && scale_max >= scale_min && scale_min <= 1.0 && scale_max >= 1.0,
          "scale_max", "need 0 < scale_min <= 1 <= scale_max");
  require(scale_tie_tol >= 0.0 && scale_tie_tol < 1.0, "scale_tie_tol", "must lie in [0, 1)");
  require(upsample >= 1, "upsample", "must be >= 1");
  require(newton_iters >= 0, "newton_iters", "must be >= 0");
}

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::Baseline: return "baseline";
    case Variant::FeatureMapAvgPool: return "feature_map_avg_pool";
    case Variant::FeatureMapMaxPool: return "feature_map_max_pool";
    default: return "rpcf";
  }
}

Variant parse_variant(const std::string& name) {
  for (Variant v : all_variants())
    if (name == variant_name(v)) return v;
  throw ConfigError("unknown variant '" + name +
                    "' (expected baseline, feature_map_avg_pool, feature_map_max_pool or rpcf)");
}

std::vector<Variant> all_variants() {
  return {Variant::Baseline, Variant::FeatureMapAvgPool, Variant::FeatureMapMaxPool, Variant::Rpcf};
}

TrackerConfig apply_variant(TrackerConfig base, Variant v) {
  const int kernel = std::max(base.e, 2);
  base.variant = v;
  switch (v) {
    case Variant::Baseline:
      base.e = 1;
      base.features.pooling = FeaturePooling::None;
      break;
    case Variant::FeatureMapAvgPool:
    case Variant::FeatureMapMaxPool:
      base.features.pooling =
          v == Variant::FeatureMapAvgPool ? FeaturePooling::Average : FeaturePooling::Max;
      base.features.pool_factor = kernel;
      base.e = 1;
      break;
    case Variant::Rpcf:
      base.features.pooling = FeaturePooling::None;
      break;
  }
  return base;
}

void set_config_value(TrackerConfig& config, const std::string& key, const std::string& value) {
  for (const Key& k : keys())
    if (key == k.name) {
      k.set(config, key, value);
      return;
    }
  throw ConfigError("unknown config key '" + key + "'");
}

TrackerConfig parse_config(const std::string& text, TrackerConfig base) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      set_config_value(base, key, value);
    } catch (const ConfigError& err) {
      throw ConfigError("config line " + std::to_string(lineno) + ": " + err.what());
    }
  }
  base.validate();
  return base;
}

TrackerConfig load_config(const std::filesystem::path& path, TrackerConfig base) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << f.rdbuf();
  try {
    return parse_config(buf.str(), std::move(base));
  } catch (const ConfigError& err) {
    throw ConfigError(path.string() + ": " + err.what());
  }
}

std::vector<std::pair<std::string, std::string>> config_entries(const TrackerConfig& config) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const Key& k : keys())
    if (k.get) out.emplace_back(k.name, k.get(config));
  return out;
}

std::string format_config(const TrackerConfig& config) {
  std::ostringstream out;
  for (const auto& [k, v] : config_entries(config)) out << k << " = " << v << "\n";
  return out.str();
}

}  // namespace rpcf
