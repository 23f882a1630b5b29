#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "rpcf/bench.hpp"
#include "rpcf/config.hpp"
#include "rpcf/selfcheck/criteria.hpp"
#include "rpcf/synthetic.hpp"

namespace fs = std::filesystem;
using namespace rpcf;

namespace {

TrackerConfig resolve_config(const std::string& config_path, const std::string& variant) {
  TrackerConfig cfg = config_path.empty() ? TrackerConfig{} : load_config(config_path);
  return apply_variant(cfg, variant.empty() ? cfg.variant : parse_variant(variant));
}

void print_summary(const EvalResult& r, const fs::path& out) {
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
  std::printf("sequences %zu (failed %d)  DP@20 %.4f  AUC %.4f  -> %s\n", r.sequences.size(), r.failed,
              r.dp20, r.auc, out.string().c_str());
}

int write_synthetic(const fs::path& out, const std::string& kind) {
  std::vector<SyntheticSpec> specs;
  if (kind == "translate" || kind == "all") specs.push_back(translating_spec());
  if (kind == "sweep" || kind == "all")
    for (const auto& s : deformation_sweep()) specs.push_back(s);
  if (specs.empty()) throw std::invalid_argument("unknown synthetic set '" + kind + "'");
  for (const auto& spec : specs) {
    write_sequence(make_synthetic_sequence(spec), out / spec.name);
    std::printf("%s: %d frames\n", (out / spec.name).string().c_str(), spec.frames);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ROI pooled correlation filter tracker"};
  app.require_subcommand(1);

  std::string seq_dir, dataset_dir, config_path, variant, out_dir = "results";
  int workers = 0;

  auto* track = app.add_subcommand("track", "Track one OTB-layout sequence");
  track->add_option("seq_dir", seq_dir, "Sequence directory (img/ + groundtruth_rect.txt)")
      ->required()->check(CLI::ExistingDirectory);
  track->add_option("--config", config_path, "key = value config file")->check(CLI::ExistingFile);
  track->add_option("--variant", variant, "baseline, feature_map_avg_pool, feature_map_max_pool or rpcf");
  track->add_option("--out", out_dir, "Output directory")->capture_default_str();

  auto* eval = app.add_subcommand("eval", "One-pass evaluation over a dataset directory");
  eval->add_option("dataset_dir", dataset_dir, "Directory of OTB-layout sequences")
      ->required()->check(CLI::ExistingDirectory);
  eval->add_option("--variant", variant, "Ablation variant, or 'all' for the full ablation table");
  eval->add_option("--config", config_path, "key = value config file")->check(CLI::ExistingFile);
  eval->add_option("--out", out_dir, "Output directory")->capture_default_str();
  eval->add_option("--workers", workers, "Worker threads (0 = one per core)")->check(CLI::NonNegativeNumber);

  selfcheck::Options check;
  std::string otb_dir, scratch;
  auto* selftest = app.add_subcommand("selftest", "Run the oracle and acceptance suites");
  selftest->add_option("--otb", otb_dir, "Optional OTB dataset to run end to end")->check(CLI::ExistingDirectory);
  selftest->add_option("--scratch", scratch, "Keep intermediate files here");
  selftest->add_option("--workers", workers, "Worker threads (0 = one per core)")->check(CLI::NonNegativeNumber);

  std::string synth_out, synth_kind = "all";
  auto* synth = app.add_subcommand("synth", "Write the synthetic sequences in OTB layout");
  synth->add_option("out_dir", synth_out, "Destination")->required();
  synth->add_option("--set", synth_kind, "translate, sweep or all")->capture_default_str();

  auto* show = app.add_subcommand("config", "Print the effective configuration");
  show->add_option("--config", config_path, "key = value config file")->check(CLI::ExistingFile);
  show->add_option("--variant", variant, "Ablation variant");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*track) {
      const TrackerConfig cfg = resolve_config(config_path, variant);
      const EvalResult r = evaluate_ope(cfg, {load_sequence(seq_dir)}, 1);
      emit_results(r, out_dir);
      print_summary(r, out_dir);
      return r.failed ? 1 : 0;
    }
    if (*eval) {
      if (variant == "all") {
        const TrackerConfig base = resolve_config(config_path, "");
        const auto rows = run_ablation(base, all_variants(), load_dataset(dataset_dir), workers);
        for (const auto& row : rows) emit_results(row.result, fs::path(out_dir) / variant_name(row.variant));
        const std::string table = format_ablation_table(rows);
        std::ofstream(fs::path(out_dir) / "ablation.csv") << table;
        std::cout << table;
        return 0;
      }
      const EvalResult r = run_eval(dataset_dir, resolve_config(config_path, variant), out_dir, workers);
      print_summary(r, out_dir);
      return r.failed == static_cast<int>(r.sequences.size()) ? 1 : 0;
    }
    if (*selftest) {
      check.otb_dir = otb_dir;
      check.scratch = scratch;
      check.workers = workers;
      const auto results = selfcheck::run_all(check);
      for (const auto& r : results) std::cout << selfcheck::format_line(r) << "\n";
      return selfcheck::all_passed(results) ? 0 : 1;
    }
    if (*synth) return write_synthetic(synth_out, synth_kind);
    if (*show) {
      std::cout << format_config(resolve_config(config_path, variant));
      return 0;
    }
  } catch (const std::exception& err) {
    std::cerr << "rpcf: error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
