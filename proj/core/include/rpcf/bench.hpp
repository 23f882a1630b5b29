#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "rpcf/config.hpp"
#include "rpcf/image.hpp"
#include "rpcf/tracker.hpp"

namespace rpcf {

/// One OTB-style sequence. Frames come either from files or from memory.
struct Sequence {
  std::string name;
  std::vector<std::filesystem::path> frame_paths;
  std::vector<Image> frames;
  std::vector<BBox> ground_truth;
  std::vector<std::string> attributes;

  size_t size() const { return ground_truth.size(); }
  Image frame(size_t i) const;
};

/// One box per non-empty line, "x,y,w,h" separated by commas, tabs or
/// spaces, 1-indexed; returned 0-indexed. Errors name the line.
std::vector<BBox> parse_groundtruth(const std::string& text);

/// `dir/img/*` (sorted by filename) plus `dir/groundtruth_rect.txt`; an
/// optional `attributes.txt` holds comma-separated tags.
Sequence load_sequence(const std::filesystem::path& dir);

/// Every subdirectory holding a groundtruth_rect.txt, sorted by name. A
/// directory that is itself a sequence yields just that sequence.
std::vector<Sequence> load_dataset(const std::filesystem::path& dir);

double iou(const BBox& a, const BBox& b);
double center_error(const BBox& a, const BBox& b);

/// 0, 1, ..., 50 pixels.
std::vector<double> precision_thresholds();
/// 0, 0.02, ..., 1.
std::vector<double> success_thresholds();

struct SequenceResult {
  std::string name;
  std::vector<BBox> boxes;
  std::vector<double> center_errors;
  std::vector<double> overlaps;
  std::vector<double> precision;  // fraction of frames with error <= threshold
  std::vector<double> success;    // fraction of frames with overlap >= threshold
  double dp20 = 0.0;
  double auc = 0.0;
  bool failed = false;
  std::string error;
};

struct EvalResult {
  std::vector<SequenceResult> sequences;  // sorted by name
  std::vector<double> precision;          // mean over successful sequences
  std::vector<double> success;
  double dp20 = 0.0;
  double auc = 0.0;
  int failed = 0;
  std::vector<std::string> warnings;
};

SequenceResult score_sequence(const std::string& name, const std::vector<BBox>& boxes,
                              const std::vector<BBox>& ground_truth);

/// Produces one box per frame, starting from the first ground-truth box.
using TrackerRunner = std::function<std::vector<BBox>(const Sequence&)>;

TrackerRunner make_tracker_runner(const TrackerConfig& config,
                                  std::shared_ptr<const ColorNameTable> table = nullptr);

/// One-pass evaluation: every sequence runs once, without resets. Sequences
/// are spread over `workers` threads (0 = hardware concurrency) and reduced
/// in name order. A sequence whose runner throws is reported and left out of
/// the aggregate.
EvalResult evaluate_ope(const TrackerRunner& runner, const std::vector<Sequence>& sequences,
                        int workers = 0);
EvalResult evaluate_ope(const TrackerConfig& config, const std::vector<Sequence>& sequences,
                        int workers = 0);

struct AblationRow {
  Variant variant = Variant::Rpcf;
  EvalResult result;
};

std::vector<AblationRow> run_ablation(const TrackerConfig& base, const std::vector<Variant>& variants,
                                      const std::vector<Sequence>& sequences, int workers = 0);
/// "variant,dp20,auc" header plus one row per variant.
std::string format_ablation_table(const std::vector<AblationRow>& rows);

/// Writes <sequence>.csv per sequence, metrics.txt, precision.csv and
/// success.csv into out_dir (created if needed).
void emit_results(const EvalResult& result, const std::filesystem::path& out_dir);

/// load_dataset + evaluate_ope + emit_results: what `rpcf eval` does.
EvalResult run_eval(const std::filesystem::path& dataset_dir, const TrackerConfig& config,
                    const std::filesystem::path& out_dir, int workers = 0);

/// "frame,x,y,w,h" followed by one 1-based row per box.
std::string format_boxes(const std::vector<BBox>& boxes);

}  // namespace rpcf
