#include "rpcf/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace rpcf {
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path.string());
  std::stringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
  if (!f) throw std::runtime_error("write failed for " + path.string());
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

bool is_image_file(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".jpg" || ext == ".jpeg" || ext == ".png" || ext == ".bmp" || ext == ".ppm" ||
         ext == ".pgm" || ext == ".tif" || ext == ".tiff";
}

std::string single_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  std::replace(s.begin(), s.end(), '\r', ' ');
  return s;
}

std::vector<double> curve_mean(const std::vector<const std::vector<double>*>& curves, size_t n) {
  std::vector<double> out(n, 0.0);
  if (curves.empty()) return out;
  for (const auto* c : curves)
    for (size_t i = 0; i < n; ++i) out[i] += (*c)[i];
  for (double& v : out) v /= static_cast<double>(curves.size());
  return out;
}

}  // namespace

Image Sequence::frame(size_t i) const {
  if (i < frames.size()) return frames[i];
  if (i < frame_paths.size()) return load_image(frame_paths[i]);
  throw std::out_of_range("sequence '" + name + "' has no frame " + std::to_string(i));
}

std::vector<BBox> parse_groundtruth(const std::string& text) {
  std::vector<BBox> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    for (char& c : line)
      if (c == ',' || c == '\t' || c == '\r' || c == ';') c = ' ';
    std::istringstream fields(line);
    std::vector<double> v;
    std::string tok;
    while (fields >> tok) {
      try {
        size_t used = 0;
        v.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw std::runtime_error("groundtruth line " + std::to_string(lineno) + ": bad number '" + tok + "'");
      }
    }
    if (v.empty()) continue;
    if (v.size() != 4)
      throw std::runtime_error("groundtruth line " + std::to_string(lineno) + ": expected 4 values, got " +
                               std::to_string(v.size()));
    if (!(v[2] > 0.0) || !(v[3] > 0.0))
      throw std::runtime_error("groundtruth line " + std::to_string(lineno) + ": box size must be positive");
    out.push_back({v[0] - 1.0, v[1] - 1.0, v[2], v[3]});
  }
  return out;
}

Sequence load_sequence(const fs::path& dir) {
  Sequence seq;
  seq.name = dir.filename().string();
  if (seq.name.empty()) seq.name = dir.parent_path().filename().string();
  const fs::path img = dir / "img";
  if (!fs::is_directory(img)) throw std::runtime_error(dir.string() + ": missing img/ directory");
  for (const auto& entry : fs::directory_iterator(img))
    if (entry.is_regular_file() && is_image_file(entry.path())) seq.frame_paths.push_back(entry.path());
  std::sort(seq.frame_paths.begin(), seq.frame_paths.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });

  const fs::path gt = dir / "groundtruth_rect.txt";
  if (!fs::exists(gt)) throw std::runtime_error(dir.string() + ": missing groundtruth_rect.txt");
  try {
    seq.ground_truth = parse_groundtruth(read_file(gt));
  } catch (const std::runtime_error& err) {
    throw std::runtime_error(gt.string() + ": " + err.what());
  }
  if (seq.ground_truth.size() != seq.frame_paths.size())
    throw std::runtime_error(dir.string() + ": " + std::to_string(seq.frame_paths.size()) + " frames but " +
                             std::to_string(seq.ground_truth.size()) + " ground-truth boxes");
  if (seq.ground_truth.empty()) throw std::runtime_error(dir.string() + ": empty sequence");

  if (const fs::path attr = dir / "attributes.txt"; fs::exists(attr)) {
    std::string text = read_file(attr);
    std::replace(text.begin(), text.end(), ',', ' ');
    std::istringstream in(text);
    std::string tag;
    while (in >> tag) seq.attributes.push_back(tag);
  }
  return seq;
}

std::vector<Sequence> load_dataset(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw std::runtime_error(dir.string() + ": not a directory");
  if (fs::exists(dir / "groundtruth_rect.txt")) return {load_sequence(dir)};
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_directory() && fs::exists(entry.path() / "groundtruth_rect.txt")) dirs.push_back(entry.path());
  std::sort(dirs.begin(), dirs.end());
  if (dirs.empty()) throw std::runtime_error(dir.string() + ": no sequences found");
  std::vector<Sequence> out;
  for (const auto& d : dirs) out.push_back(load_sequence(d));
  return out;
}

double iou(const BBox& a, const BBox& b) {
  const double iw = std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x);
  const double ih = std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  return inter / (a.w * a.h + b.w * b.h - inter);
}

double center_error(const BBox& a, const BBox& b) {
  const Point2 ca = a.center(), cb = b.center();
  return std::hypot(ca.x - cb.x, ca.y - cb.y);
}

std::vector<double> precision_thresholds() {
  std::vector<double> t;
  for (int i = 0; i <= 50; ++i) t.push_back(i);
  return t;
}

std::vector<double> success_thresholds() {
  std::vector<double> t;
  for (int i = 0; i <= 50; ++i) t.push_back(i / 50.0);
  return t;
}

SequenceResult score_sequence(const std::string& name, const std::vector<BBox>& boxes,
                              const std::vector<BBox>& ground_truth) {
  if (boxes.size() != ground_truth.size())
    throw std::invalid_argument("score_sequence: " + std::to_string(boxes.size()) + " boxes for " +
                                std::to_string(ground_truth.size()) + " frames");
  SequenceResult r;
  r.name = name;
  r.boxes = boxes;
  for (size_t i = 0; i < boxes.size(); ++i) {
    r.center_errors.push_back(center_error(boxes[i], ground_truth[i]));
    r.overlaps.push_back(iou(boxes[i], ground_truth[i]));
  }
  const double n = std::max<double>(1.0, static_cast<double>(boxes.size()));
  for (double t : precision_thresholds())
    r.precision.push_back(std::count_if(r.center_errors.begin(), r.center_errors.end(),
                                        [t](double e) { return e <= t; }) / n);
  for (double t : success_thresholds())
    r.success.push_back(std::count_if(r.overlaps.begin(), r.overlaps.end(),
                                      [t](double o) { return o >= t; }) / n);
  r.dp20 = r.precision[20];
  double s = 0.0;
  for (double v : r.success) s += v;
  r.auc = s / static_cast<double>(r.success.size());
  return r;
}

TrackerRunner make_tracker_runner(const TrackerConfig& config, std::shared_ptr<const ColorNameTable> table) {
  return [config, table](const Sequence& seq) {
    std::vector<BBox> boxes;
    boxes.reserve(seq.size());
    TrackerState state = tracker_init(seq.frame(0), seq.ground_truth.front(), config, table);
    boxes.push_back(state.box());
    for (size_t i = 1; i < seq.size(); ++i) boxes.push_back(tracker_step(state, seq.frame(i)));
    return boxes;
  };
}

EvalResult evaluate_ope(const TrackerRunner& runner, const std::vector<Sequence>& sequences, int workers) {
  if (sequences.empty()) throw std::invalid_argument("evaluate_ope: no sequences");
  std::vector<size_t> order(sequences.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return sequences[a].name < sequences[b].name; });

  std::vector<SequenceResult> results(sequences.size());
  std::atomic<size_t> next{0};
  auto work = [&] {
    for (size_t k = next++; k < order.size(); k = next++) {
      const Sequence& seq = sequences[order[k]];
      try {
        results[k] = score_sequence(seq.name, runner(seq), seq.ground_truth);
      } catch (const std::exception& err) {
        results[k] = SequenceResult{};
        results[k].name = seq.name;
        results[k].failed = true;
        results[k].error = single_line(err.what());
      }
    }
  };
  unsigned n = workers > 0 ? static_cast<unsigned>(workers) : std::max(1u, std::thread::hardware_concurrency());
  n = std::min<unsigned>(n, static_cast<unsigned>(sequences.size()));
  if (n <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  EvalResult out;
  std::vector<const std::vector<double>*> prec, succ;
  for (auto& r : results) {
    if (r.failed) {
      ++out.failed;
      out.warnings.push_back("sequence '" + r.name + "' failed: " + r.error);
    } else {
      prec.push_back(&r.precision);
      succ.push_back(&r.success);
    }
  }
  out.precision = curve_mean(prec, precision_thresholds().size());
  out.success = curve_mean(succ, success_thresholds().size());
  out.dp20 = out.precision[20];
  double s = 0.0;
  for (double v : out.success) s += v;
  out.auc = s / static_cast<double>(out.success.size());
  out.sequences = std::move(results);
  return out;
}

EvalResult evaluate_ope(const TrackerConfig& config, const std::vector<Sequence>& sequences, int workers) {
  config.validate();
  bool any_color = false;
  for (const auto& seq : sequences) any_color = any_color || seq.frame(0).channels == 3;
  std::shared_ptr<const ColorNameTable> table;
  if (any_color)
    table = std::make_shared<const ColorNameTable>(ColorNameTable::load_default(config.features.colornames_path));
  return evaluate_ope(make_tracker_runner(config, table), sequences, workers);
}

std::vector<AblationRow> run_ablation(const TrackerConfig& base, const std::vector<Variant>& variants,
                                      const std::vector<Sequence>& sequences, int workers) {
  std::vector<AblationRow> rows;
  for (Variant v : variants) rows.push_back({v, evaluate_ope(apply_variant(base, v), sequences, workers)});
  return rows;
}

std::string format_ablation_table(const std::vector<AblationRow>& rows) {
  std::ostringstream out;
  out << "variant,dp20,auc\n";
  for (const auto& r : rows)
    out << variant_name(r.variant) << "," << fixed6(r.result.dp20) << "," << fixed6(r.result.auc) << "\n";
  return out.str();
}

std::string format_boxes(const std::vector<BBox>& boxes) {
  std::ostringstream out;
  out << "frame,x,y,w,h\n";
  for (size_t i = 0; i < boxes.size(); ++i)
    out << i + 1 << "," << fixed6(boxes[i].x) << "," << fixed6(boxes[i].y) << "," << fixed6(boxes[i].w)
        << "," << fixed6(boxes[i].h) << "\n";
  return out.str();
}

void emit_results(const EvalResult& result, const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir))
    throw std::runtime_error("cannot create output directory " + out_dir.string());

  std::ostringstream metrics;
  int ok = 0;
  for (const auto& s : result.sequences) ok += s.failed ? 0 : 1;
  metrics << "sequences = " << ok << "\n";
  metrics << "failed = " << result.failed << "\n";
  metrics << "dp20 = " << fixed6(result.dp20) << "\n";
  metrics << "auc = " << fixed6(result.auc) << "\n";
  for (const auto& s : result.sequences) {
    if (s.failed) {
      metrics << s.name << ".error = " << s.error << "\n";
      continue;
    }
    metrics << s.name << ".dp20 = " << fixed6(s.dp20) << "\n";
    metrics << s.name << ".auc = " << fixed6(s.auc) << "\n";
    write_file(out_dir / (s.name + ".csv"), format_boxes(s.boxes));
  }
  write_file(out_dir / "metrics.txt", metrics.str());

  auto curve = [&](const std::vector<double>& thresholds, const std::vector<double>& values) {
    std::ostringstream c;
    c << "threshold,value\n";
    if (ok == 0) return c.str();
    for (size_t i = 0; i < thresholds.size(); ++i) c << fixed6(thresholds[i]) << "," << fixed6(values[i]) << "\n";
    return c.str();
  };
  write_file(out_dir / "precision.csv", curve(precision_thresholds(), result.precision));
  write_file(out_dir / "success.csv", curve(success_thresholds(), result.success));
}

EvalResult run_eval(const fs::path& dataset_dir, const TrackerConfig& config, const fs::path& out_dir,
                    int workers) {
  const std::vector<Sequence> sequences = load_dataset(dataset_dir);
  if (sequences.empty()) throw std::runtime_error("no sequences under " + dataset_dir.string());
  EvalResult result = evaluate_ope(config, sequences, workers);
  emit_results(result, out_dir);
  return result;
}

}  // namespace rpcf
