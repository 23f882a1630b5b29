#include "doctest.h"
#include "oracles.hpp"
#include "rpcf/bench.hpp"
#include "rpcf/synthetic.hpp"
#include "rpcf/tracker.hpp"

using namespace rpcf;

namespace {

std::shared_ptr<const ColorNameTable> table() {
  static const auto t = std::make_shared<const ColorNameTable>(ColorNameTable::load_default());
  return t;
}

Sequence short_sequence(int frames, std::uint64_t seed = 3) {
  SyntheticSpec s = translating_spec();
  s.frames = frames;
  s.seed = seed;
  return make_synthetic_sequence(s);
}

// Index of the maximum, wrapped to signed offsets.
std::pair<int, int> argmax(const RealGrid& r) {
  Eigen::Index i, j;
  r.maxCoeff(&i, &j);
  return {spectral::wrap_offset(static_cast<int>(i), static_cast<int>(r.rows())),
          spectral::wrap_offset(static_cast<int>(j), static_cast<int>(r.cols()))};
}

TrackerState bare_state(std::vector<double> factors) {
  TrackerState s;
  s.center = {100.0, 80.0};
  s.scale_factors = std::move(factors);
  s.cell_px = 4.0;
  return s;
}

}  // namespace

TEST_SUITE("tracker") {

TEST_CASE("initialization") {
  const Sequence seq = short_sequence(1);
  const TrackerState s = tracker_init(seq.frame(0), seq.ground_truth[0], TrackerConfig{}, table());
  CHECK(s.rows == 50);
  CHECK(s.cols == 50);
  CHECK(s.patch_side % 8 == 0);
  CHECK(s.patch_side >= 200);
  CHECK(s.patch_side <= 250);
  CHECK(s.filter.depth() == 13);
  CHECK(s.first_frame_residual <= 1e-2);
  CHECK(s.frame_index == 1);
  CHECK(s.box().x == doctest::Approx(seq.ground_truth[0].x));
  CHECK(s.box().w == doctest::Approx(seq.ground_truth[0].w));
}

TEST_CASE("self response") {
  const Sequence seq = short_sequence(1);
  const Image frame = seq.frame(0);
  const TrackerState s = tracker_init(frame, seq.ground_truth[0], TrackerConfig{}, table());
  const FeatureStack stack = extract_features(s, frame, s.center, 1.0);

  const auto [dy, dx] = argmax(response_map(sample_spectra(stack), s.filter));
  CHECK(std::abs(dy) <= 1);
  CHECK(std::abs(dx) <= 1);

  FeatureStack shifted = stack;
  for (auto& c : shifted.channels) c = spectral::circshift(c, 2, 1);
  const auto [sy, sx] = argmax(response_map(sample_spectra(shifted), s.filter));
  CHECK(std::abs(sy - 2) <= 1);
  CHECK(std::abs(sx - 1) <= 1);

  FeatureStack zero = stack;
  for (auto& c : zero.channels) c.setZero();
  CHECK(oracle::max_abs(response_map(sample_spectra(zero), s.filter)) == 0.0);
}

TEST_CASE("localize") {
  SUBCASE("delta response converts cells to pixels") {
    const TrackerState s = bare_state({1.0});
    RealGrid r = RealGrid::Zero(16, 16);
    r(2, 3) = 1.0;
    const Localization loc = localize(s, {r});
    CHECK_FALSE(loc.degenerate);
    CHECK(loc.center.y == doctest::Approx(80.0 + 8.0).epsilon(1e-6));
    CHECK(loc.center.x == doctest::Approx(100.0 + 12.0).epsilon(1e-6));
    CHECK(loc.scale == 1.0);
  }
  SUBCASE("flat responses hold the center") {
    const TrackerState s = bare_state({1.0 / 1.02, 1.0, 1.02});
    const std::vector<RealGrid> flat(3, RealGrid::Constant(8, 8, 0.5));
    const Localization loc = localize(s, flat);
    CHECK(loc.degenerate);
    CHECK(loc.center.x == 100.0);
    CHECK(loc.center.y == 80.0);
    CHECK(loc.scale_index == -1);
  }
  SUBCASE("the clearly larger peak picks its scale") {
    const TrackerState s = bare_state({1.0, 1.02});
    RealGrid a = RealGrid::Zero(16, 16), b = RealGrid::Zero(16, 16);
    a(0, 0) = 1.0;
    b(1, 0) = 2.0;
    const Localization loc = localize(s, {a, b});
    CHECK(loc.scale_index == 1);
    CHECK(loc.scale == doctest::Approx(1.02));
    CHECK(loc.center.y == doctest::Approx(80.0 + 4.0 * 1.02).epsilon(1e-6));
  }
  SUBCASE("near ties prefer the smaller scale change") {
    const TrackerState s = bare_state({1.0 / 1.02, 1.0, 1.02});
    std::vector<RealGrid> r(3, RealGrid::Zero(16, 16));
    r[0](0, 0) = 1.01;
    r[1](0, 0) = 1.0;
    r[2](0, 0) = 1.005;
    CHECK(localize(s, r).scale_index == 1);
  }
  SUBCASE("the center is clamped to the frame") {
    TrackerState s = bare_state({1.0});
    s.frame_width = 104;
    s.frame_height = 200;
    RealGrid r = RealGrid::Zero(16, 16);
    r(0, 3) = 1.0;
    CHECK(localize(s, {r}).center.x == 104.0);
  }
  CHECK_THROWS(localize(bare_state({1.0}), {}));
  CHECK_THROWS(localize(bare_state({1.0, 1.02}), {RealGrid::Zero(4, 4)}));
}

TEST_CASE("static scene") {
  SyntheticSpec spec = translating_spec();
  spec.vx = spec.vy = 0.0;
  spec.frames = 50;
  const Sequence seq = make_synthetic_sequence(spec);
  TrackerState s = tracker_init(seq.frame(0), seq.ground_truth[0], TrackerConfig{}, table());
  double worst = 1.0;
  for (size_t t = 1; t < seq.size(); ++t) worst = std::min(worst, iou(tracker_step(s, seq.frame(t)), seq.ground_truth[t]));
  CHECK(worst >= 0.9);
}

TEST_CASE("translating target") {
  const Sequence seq = make_synthetic_sequence(translating_spec());
  TrackerState s = tracker_init(seq.frame(0), seq.ground_truth[0], TrackerConfig{}, table());
  double worst = 0.0;
  for (size_t t = 1; t < seq.size(); ++t) {
    const BBox b = tracker_step(s, seq.frame(t));
    if (t >= 2) worst = std::max(worst, center_error(b, seq.ground_truth[t]));
  }
  CHECK(worst <= 2.0);
}

TEST_CASE("update schedule and warm start") {
  const Sequence seq = short_sequence(7);
  TrackerConfig cfg;
  TrackerState s = tracker_init(seq.frame(0), seq.ground_truth[0], cfg, table());

  const MultiSpectrum before = s.filter.w_hat;
  tracker_step(s, seq.frame(1));
  CHECK_FALSE(s.updated_last_step);
  for (size_t d = 0; d < before.size(); ++d) CHECK((s.filter.w_hat[d] == before[d]).all());
  CHECK(s.memory.size() == 2);

  for (int t = 2; t < 5; ++t) tracker_step(s, seq.frame(t));
  CHECK(s.frame_index == 5);
  const TrackerState prev = s;
  tracker_step(s, seq.frame(5));
  REQUIRE(s.updated_last_step);
  const AdmmResult cold = admm_solve(s.memory, s.context, cfg.solver, TrainingPhase::Update, nullptr, &prev.admm);
  CHECK(s.last_trace.cg_initial_residual.front() <= cold.trace.cg_initial_residual.front());
}

TEST_CASE("determinism") {
  const Sequence seq = short_sequence(12, 9);
  auto run = [&] {
    TrackerState s = tracker_init(seq.frame(0), seq.ground_truth[0], TrackerConfig{}, table());
    std::vector<BBox> out;
    for (size_t t = 1; t < seq.size(); ++t) out.push_back(tracker_step(s, seq.frame(t)));
    return out;
  };
  const auto a = run(), b = run();
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].x == b[i].x);
    CHECK(a[i].y == b[i].y);
    CHECK(a[i].w == b[i].w);
    CHECK(a[i].h == b[i].h);
  }
}

TEST_CASE("scale and image bounds") {
  SyntheticSpec spec = deformation_sweep({0.9}, 30)[0];
  const Sequence seq = make_synthetic_sequence(spec);
  TrackerConfig cfg;
  cfg.scale_min = 0.99;
  cfg.scale_max = 1.01;
  TrackerState s = tracker_init(seq.frame(0), seq.ground_truth[0], cfg, table());
  for (size_t t = 1; t < seq.size(); ++t) {
    const BBox b = tracker_step(s, seq.frame(t));
    CHECK(s.scale >= 0.99);
    CHECK(s.scale <= 1.01);
    CHECK(b.w >= 0.99 * spec.target_w - 1e-9);
    CHECK(b.w <= 1.01 * spec.target_w + 1e-9);
    CHECK(b.x >= 0.0);
    CHECK(b.y >= 0.0);
    CHECK(b.x + b.w <= spec.width);
    CHECK(b.y + b.h <= spec.height);
  }
}

TEST_CASE("boxes near the border are clamped into the frame") {
  TrackerState s;
  s.center = {2.0, 3.0};
  s.target_size = {20.0, 10.0};
  s.frame_width = 100;
  s.frame_height = 50;
  const BBox b = s.box();
  CHECK(b.x == 0.0);
  CHECK(b.y == 0.0);
  CHECK(b.w == 20.0);
}

TEST_CASE("initialization errors") {
  const Sequence seq = short_sequence(1);
  const Image f = seq.frame(0);
  CHECK_THROWS_AS(tracker_init(f, {10, 10, 0, 5}, TrackerConfig{}, table()), std::invalid_argument);
  CHECK_THROWS_AS(tracker_init(f, {0, 0, 500, 20}, TrackerConfig{}, table()), std::invalid_argument);
  CHECK_THROWS_AS(tracker_init(f, {-100, 10, 20, 20}, TrackerConfig{}, table()), std::invalid_argument);
  CHECK_THROWS_AS(tracker_init(Image{}, {10, 10, 5, 5}, TrackerConfig{}, table()), std::invalid_argument);
  TrackerConfig bad;
  bad.num_scales = 0;
  CHECK_THROWS_AS(tracker_init(f, seq.ground_truth[0], bad, table()), ConfigError);
  TrackerState fresh;
  CHECK_THROWS(tracker_step(fresh, f));
}

TEST_CASE("gray input and pooled variants") {
  const Sequence seq = short_sequence(3);
  const Image gray = to_gray(seq.frame(0));
  TrackerState g = tracker_init(gray, seq.ground_truth[0], TrackerConfig{}, table());
  CHECK_FALSE(g.color);
  CHECK(g.filter.depth() == 11);
  tracker_step(g, to_gray(seq.frame(1)));
  tracker_step(g, seq.frame(2));

  const TrackerState avg = tracker_init(seq.frame(0), seq.ground_truth[0],
                                        apply_variant(TrackerConfig{}, Variant::FeatureMapAvgPool), table());
  CHECK(avg.rows == 25);
  CHECK(avg.cols == 25);
  CHECK(avg.context.pairs.empty());
  const TrackerState base = tracker_init(seq.frame(0), seq.ground_truth[0],
                                         apply_variant(TrackerConfig{}, Variant::Baseline), table());
  CHECK(base.rows == 50);
  CHECK(base.context.pairs.empty());
}

}
