#include <random>

#include <benchmark/benchmark.h>

#include "rpcf/synthetic.hpp"
#include "rpcf/tracker.hpp"

using namespace rpcf;

namespace {

RealGrid noise(int rows, int cols, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  RealGrid g(rows, cols);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = n(rng);
  return g;
}

// A tracker-sized training problem: n x n grid, D channels, one sample.
struct Fixture {
  FilterContext ctx;
  SampleMemory memory;
  AdmmState state;
  MultiSpectrum u;

  Fixture(int n, int depth) {
    const int t = n / 5;
    CropMask mask = build_mask(n, n, t, t, 2);
    ConstraintPairSet pairs = build_constraint_pairs(mask, 2);
    std::vector<PenaltyGroup> pen(depth, PenaltyGroup::Low);
    pen[0] = PenaltyGroup::High;
    ctx = make_filter_context(std::move(mask), build_regularizer(n, n, t, t), std::move(pairs),
                              build_label(n, n, t, t).y, pen);
    MultiSpectrum x;
    for (int d = 0; d < depth; ++d) {
      x.push_back(spectral::forward(noise(n, n, 10 + d)));
      u.push_back(spectral::forward(noise(n, n, 100 + d)));
    }
    memory.insert({x, 0.0, 1});
    state = AdmmState::initial(ctx.penalties, ctx.pairs.size(), SolverConfig{});
  }
};

}  // namespace

static void BM_Forward(benchmark::State& st) {
  const RealGrid g = noise(static_cast<int>(st.range(0)), static_cast<int>(st.range(0)), 1);
  for (auto _ : st) benchmark::DoNotOptimize(spectral::forward(g));
}
BENCHMARK(BM_Forward)->Arg(32)->Arg(50)->Arg(64);

static void BM_DataTerm(benchmark::State& st) {
  Fixture f(static_cast<int>(st.range(0)), 13);
  for (auto _ : st) benchmark::DoNotOptimize(apply_data_term(f.memory, f.ctx.mask, f.u));
}
BENCHMARK(BM_DataTerm)->Arg(32)->Arg(50);

static void BM_ConstraintTerm(benchmark::State& st) {
  Fixture f(static_cast<int>(st.range(0)), 13);
  for (auto _ : st) benchmark::DoNotOptimize(apply_constraint_term(f.ctx.pairs, f.state.gamma, f.u));
}
BENCHMARK(BM_ConstraintTerm)->Arg(32)->Arg(50);

static void BM_NormalSystemApply(benchmark::State& st) {
  Fixture f(static_cast<int>(st.range(0)), 13);
  const NormalSystem sys(f.memory, f.ctx, 1e-2, f.state);
  for (auto _ : st) benchmark::DoNotOptimize(sys.apply(f.u));
}
BENCHMARK(BM_NormalSystemApply)->Arg(32)->Arg(50);

static void BM_AdmmUpdate(benchmark::State& st) {
  Fixture f(50, 13);
  const AdmmResult first = admm_solve(f.memory, f.ctx, SolverConfig{}, TrainingPhase::First);
  for (auto _ : st)
    benchmark::DoNotOptimize(
        admm_solve(f.memory, f.ctx, SolverConfig{}, TrainingPhase::Update, &first.filter, &first.state));
}
BENCHMARK(BM_AdmmUpdate)->Unit(benchmark::kMillisecond);

static void BM_Hog(benchmark::State& st) {
  const Sequence seq = make_synthetic_sequence(translating_spec());
  const Image patch = extract_patch(seq.frame(0), {110.0, 96.0}, {200.0, 200.0}, 1.0, 200, 200);
  for (auto _ : st) benchmark::DoNotOptimize(compute_hog(patch, 4));
}
BENCHMARK(BM_Hog)->Unit(benchmark::kMillisecond);

static void BM_TrackerStep(benchmark::State& st) {
  SyntheticSpec spec = translating_spec();
  spec.frames = 40;
  const Sequence seq = make_synthetic_sequence(spec);
  TrackerState state = tracker_init(seq.frame(0), seq.ground_truth.front(), TrackerConfig{});
  size_t i = 1;
  for (auto _ : st) {
    benchmark::DoNotOptimize(tracker_step(state, seq.frame(i)));
    i = i + 1 < seq.size() ? i + 1 : 1;
  }
}
BENCHMARK(BM_TrackerStep)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
