#include <algorithm>
#include <fstream>
#include <functional>

#include "doctest.h"
#include "oracles.hpp"
#include "rpcf/config.hpp"
#include "rpcf/errors.hpp"

using namespace rpcf;

namespace {

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("defaults") {
  const TrackerConfig c;
  c.validate();
  CHECK(c.solver.gamma1 == 0.1);
  CHECK(c.solver.gamma_ratio == 3.0);
  CHECK(c.solver.gamma_max == 1000.0);
  CHECK(c.solver.alpha == 10.0);
  CHECK(c.solver.cg_budget_first == 200);
  CHECK(c.solver.cg_budget_update == 6);
  CHECK(c.memory.capacity == 50);
  CHECK(c.memory.omega == 0.02);
  CHECK(c.memory.update_interval == 6);
  CHECK(c.e == 2);
  CHECK(c.num_scales == 5);
  CHECK(c.scale_step == 1.02);
  CHECK(c.variant == Variant::Rpcf);
}

TEST_CASE("parsing") {
  const TrackerConfig c = parse_config(
      "# comment\n"
      "\n"
      "lambda = 0.5   # trailing\n"
      "e=3\n"
      "  pooling = max\n"
      "reset_multipliers = yes\n"
      "admm_iters = 4\n"
      "variant = baseline\n");
  CHECK(c.solver.lambda == 0.5);
  CHECK(c.e == 3);
  CHECK(c.features.pooling == FeaturePooling::Max);
  CHECK(c.solver.reset_multipliers);
  CHECK(c.solver.admm_iters_first == 4);
  CHECK(c.solver.admm_iters_update == 4);
  CHECK(c.variant == Variant::Baseline);
  CHECK(c.memory.capacity == 50);
}

TEST_CASE("round trip") {
  TrackerConfig c;
  c.solver.lambda = 0.0123456789;
  c.scale_tie_tol = 0.07;
  c.features.pooling = FeaturePooling::Average;
  c.memory.update_interval = 4;
  c.variant = Variant::FeatureMapMaxPool;
  const std::string text = format_config(c);
  CHECK(format_config(parse_config(text)) == text);
  CHECK(parse_config(text).solver.lambda == c.solver.lambda);

  std::vector<std::string> names;
  for (const auto& [k, v] : config_entries(c)) names.push_back(k);
  for (const char* k : {"e", "g_min", "g_slope", "sigma_factor", "T", "omega", "N_t", "lambda", "gamma1"})
    CHECK(std::find(names.begin(), names.end(), k) != names.end());
}

TEST_CASE("errors name the key or the line") {
  CHECK(error_of([] { parse_config("lambda = 1\nbogus = 2\n"); }).find("line 2") != std::string::npos);
  CHECK(error_of([] { parse_config("bogus = 2\n"); }).find("bogus") != std::string::npos);
  CHECK(error_of([] { parse_config("e = two\n"); }).find("e") != std::string::npos);
  CHECK(error_of([] { parse_config("just words\n"); }).find("line 1") != std::string::npos);
  CHECK(error_of([] { parse_config("pooling = median\n"); }).find("pooling") != std::string::npos);
  CHECK(error_of([] { parse_config("omega = 1.5\n"); }).find("omega") != std::string::npos);
  CHECK(error_of([] { parse_config("divergence_factor = 0.5\n"); }).find("divergence_factor") != std::string::npos);
  CHECK(error_of([] { load_config("/nonexistent/x.cfg"); }).find("cannot open") != std::string::npos);

  TrackerConfig c;
  c.num_scales = 0;
  CHECK(error_of([&] { c.validate(); }).find("num_scales") != std::string::npos);
}

TEST_CASE("files") {
  oracle::TempDir dir("rpcf-cfg");
  {
    std::ofstream f(dir.path() / "a.cfg");
    f << "N_t = 3\nscale_step = 1.05\n";
  }
  const TrackerConfig c = load_config(dir.path() / "a.cfg");
  CHECK(c.memory.update_interval == 3);
  CHECK(c.scale_step == 1.05);
  {
    std::ofstream f(dir.path() / "b.cfg");
    f << "N_t = 3\nN_t = x\n";
  }
  const std::string err = error_of([&] { load_config(dir.path() / "b.cfg"); });
  CHECK(err.find("b.cfg") != std::string::npos);
  CHECK(err.find("line 2") != std::string::npos);
}

TEST_CASE("variants") {
  for (Variant v : all_variants()) CHECK(parse_variant(variant_name(v)) == v);
  CHECK(all_variants().size() == 4);
  CHECK_THROWS_AS(parse_variant("nonsense"), ConfigError);

  const TrackerConfig base;
  const TrackerConfig b = apply_variant(base, Variant::Baseline);
  CHECK(b.e == 1);
  CHECK(b.features.pooling == FeaturePooling::None);
  const TrackerConfig a = apply_variant(base, Variant::FeatureMapAvgPool);
  CHECK(a.features.pooling == FeaturePooling::Average);
  CHECK(a.features.pool_factor == 2);
  CHECK(a.e == 1);
  CHECK(apply_variant(base, Variant::FeatureMapMaxPool).features.pooling == FeaturePooling::Max);
  const TrackerConfig r = apply_variant(base, Variant::Rpcf);
  CHECK(r.e == 2);
  CHECK(r.variant == Variant::Rpcf);
}

}
