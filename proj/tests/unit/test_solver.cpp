#include <Eigen/Dense>

#include "doctest.h"
#include "oracles.hpp"
#include "rpcf/errors.hpp"
#include "rpcf/solver.hpp"

using namespace rpcf;
namespace sp = rpcf::spectral;

namespace {

// A small problem on a rows x cols grid with everything needed for the
// spatial dense oracle.
struct Problem {
  int rows, cols, depth;
  std::vector<MultiGrid> x;  // spatial samples
  std::vector<double> mu;
  SampleMemory memory;
  FilterContext context;

  int n() const { return rows * cols; }
};

Problem make_problem(std::mt19937_64& rng, int rows, int cols, int tr, int tc, int e, int depth,
                     int samples = 1, std::vector<PenaltyGroup> penalties = {}) {
  Problem p{rows, cols, depth, {}, {}, SampleMemory({50, 0.3, 6}), {}};
  std::vector<TrainingSample> ts;
  for (int t = 0; t < samples; ++t) {
    MultiGrid g;
    TrainingSample s;
    for (int d = 0; d < depth; ++d) {
      g.push_back(oracle::random_grid(rng, rows, cols));
      s.x_hat.push_back(sp::forward(g.back()));
    }
    p.x.push_back(g);
    s.weight = 1.0 / samples + (samples > 1 ? (t == 0 ? 0.1 : -0.1 / (samples - 1)) : 0.0);
    p.mu.push_back(s.weight);
    ts.push_back(s);
  }
  p.memory = SampleMemory::from_samples({50, 0.3, 6}, ts);
  if (penalties.empty()) penalties.assign(depth, PenaltyGroup::Low);
  CropMask mask = build_mask(rows, cols, tr, tc, e);
  ConstraintPairSet pairs = build_constraint_pairs(mask, e);
  p.context = make_filter_context(std::move(mask), build_regularizer(rows, cols, tr, tc), std::move(pairs),
                                  build_label(rows, cols, tr, tc).y, penalties);
  return p;
}

int idx(int r, int c, int cols) { return r * cols + c; }

// (C v) = x * v over the grid, row-major.
Eigen::MatrixXd conv_matrix(const RealGrid& x) {
  const int H = static_cast<int>(x.rows()), W = static_cast<int>(x.cols());
  Eigen::MatrixXd C(H * W, H * W);
  for (int m = 0; m < H; ++m)
    for (int n = 0; n < W; ++n)
      for (int a = 0; a < H; ++a)
        for (int b = 0; b < W; ++b) C(idx(m, n, W), idx(a, b, W)) = x((m - a + H) % H, (n - b + W) % W);
  return C;
}

Eigen::VectorXd flat(const RealGrid& g) { return Eigen::Map<const Eigen::VectorXd>(g.data(), g.size()); }

Eigen::MatrixXd design(const Problem& p, int t) {
  Eigen::MatrixXd A(p.n(), p.depth * p.n());
  const Eigen::VectorXd mask = flat(p.context.mask.p);
  for (int d = 0; d < p.depth; ++d) A.middleCols(d * p.n(), p.n()) = conv_matrix(p.x[t][d]) * mask.asDiagonal();
  return A;
}

Eigen::MatrixXd pair_matrix(const ConstraintPairSet& s, int n) {
  Eigen::MatrixXd V = Eigen::MatrixXd::Zero(s.size(), n);
  for (int k = 0; k < s.size(); ++k) {
    V(k, s.pairs[k].first) += 1.0;
    V(k, s.pairs[k].second) -= 1.0;
  }
  return V;
}

// Full spatial normal matrix for penalties gamma.
Eigen::MatrixXd normal_matrix(const Problem& p, double lambda, const std::vector<double>& gamma) {
  const int N = p.n(), D = p.depth;
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(D * N, D * N);
  for (size_t t = 0; t < p.x.size(); ++t) {
    const Eigen::MatrixXd A = design(p, static_cast<int>(t));
    H += p.mu[t] * A.transpose() * A;
  }
  const Eigen::VectorXd g2 = flat(p.context.regularizer.g).array().square();
  const Eigen::MatrixXd V = pair_matrix(p.context.pairs, N);
  for (int d = 0; d < D; ++d) {
    H.block(d * N, d * N, N, N).diagonal() += lambda * g2;
    if (!gamma.empty()) H.block(d * N, d * N, N, N) += gamma[d] * V.transpose() * V;
  }
  return H;
}

Eigen::VectorXd data_rhs(const Problem& p) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(p.depth * p.n());
  for (size_t t = 0; t < p.x.size(); ++t) b += p.mu[t] * design(p, static_cast<int>(t)).transpose() * flat(p.context.label);
  return b;
}

// argmin of the loss subject to V w_d = 0, by eliminating the constraints.
MultiGrid constrained_minimizer(const Problem& p, double lambda) {
  const int N = p.n(), D = p.depth;
  const Eigen::MatrixXd H = normal_matrix(p, lambda, {});
  const Eigen::VectorXd b = data_rhs(p);
  Eigen::MatrixXd Z;
  if (p.context.pairs.empty()) {
    Z = Eigen::MatrixXd::Identity(D * N, D * N);
  } else {
    const Eigen::MatrixXd V = pair_matrix(p.context.pairs, N);
    Eigen::MatrixXd Vb = Eigen::MatrixXd::Zero(D * V.rows(), D * N);
    for (int d = 0; d < D; ++d) Vb.block(d * V.rows(), d * N, V.rows(), N) = V;
    Z = Eigen::FullPivLU<Eigen::MatrixXd>(Vb).kernel();
  }
  const Eigen::VectorXd w = Z * (Z.transpose() * H * Z).ldlt().solve(Z.transpose() * b);
  MultiGrid out;
  for (int d = 0; d < D; ++d) {
    RealGrid g(p.rows, p.cols);
    Eigen::Map<Eigen::VectorXd>(g.data(), N) = w.segment(d * N, N);
    out.push_back(g);
  }
  return out;
}

SpectralFilter to_filter(const MultiGrid& w) {
  SpectralFilter f;
  for (const auto& g : w) f.w_hat.push_back(sp::forward(g));
  return f;
}

double rel_error(const MultiGrid& a, const MultiGrid& b) {
  double num = 0.0, den = 0.0;
  for (size_t d = 0; d < a.size(); ++d) {
    num += (a[d] - b[d]).square().sum();
    den += b[d].square().sum();
  }
  return std::sqrt(num / den);
}

// F M F^-1 applied channel-wise through the naive transforms.
MultiSpectrum apply_dense(const Eigen::MatrixXd& M, const MultiSpectrum& u, int rows, int cols) {
  const int N = rows * cols, D = static_cast<int>(u.size());
  Eigen::VectorXcd v(D * N);
  for (int d = 0; d < D; ++d) {
    const Spectrum s = oracle::idft(u[d]);
    v.segment(d * N, N) = Eigen::Map<const Eigen::VectorXcd>(s.data(), N);
  }
  const Eigen::VectorXcd r = M.cast<std::complex<double>>() * v;
  MultiSpectrum out;
  for (int d = 0; d < D; ++d) {
    Spectrum s(rows, cols);
    Eigen::Map<Eigen::VectorXcd>(s.data(), N) = r.segment(d * N, N);
    out.push_back(oracle::dft(s));
  }
  return out;
}

MultiSpectrum random_spectra(std::mt19937_64& rng, int depth, int rows, int cols, bool hermitian) {
  MultiSpectrum u;
  for (int d = 0; d < depth; ++d)
    u.push_back(hermitian ? sp::forward(oracle::random_grid(rng, rows, cols)) : oracle::random_complex(rng, rows, cols));
  return u;
}

double max_diff(const MultiSpectrum& a, const MultiSpectrum& b) {
  double m = 0.0;
  for (size_t d = 0; d < a.size(); ++d) m = std::max(m, oracle::max_abs(a[d] - b[d]));
  return m;
}

double max_abs(const MultiSpectrum& a) {
  double m = 0.0;
  for (const auto& s : a) m = std::max(m, oracle::max_abs(s));
  return m;
}

std::complex<double> inner(const MultiSpectrum& a, const MultiSpectrum& b) {
  std::complex<double> s = 0.0;
  for (size_t d = 0; d < a.size(); ++d) s += (a[d].conjugate() * b[d]).sum();
  return s;
}

SolverConfig extended(const Problem& p, int outer = 20) {
  SolverConfig c;
  c.cg_tol = 1e-12;
  c.admm_iters_first = outer;
  c.cg_budget_first = outer * 2 * p.depth * p.n();
  return c;
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("operator terms match the dense spatial matrices") {
  std::mt19937_64 rng(41);
  for (auto [rows, cols] : std::vector<std::pair<int, int>>{{1, 8}, {2, 4}, {4, 4}}) {
    CAPTURE(rows);
    CAPTURE(cols);
    Problem p = make_problem(rng, rows, cols, rows == 1 ? 1 : 2, 4, 2, 2, 2);
    const int N = p.n();
    const std::vector<double> gamma{0.7, 2.5};
    AdmmState st = AdmmState::initial(p.context.penalties, p.context.pairs.size(), SolverConfig{});
    st.gamma = gamma;
    const double lambda = 0.3;
    for (bool herm : {true, false}) {
      const MultiSpectrum u = random_spectra(rng, 2, rows, cols, herm);
      const double scale = max_abs(u) + 1.0;

      const Eigen::MatrixXd H = normal_matrix(p, lambda, gamma);
      CHECK(max_diff(NormalSystem(p.memory, p.context, lambda, st).apply(u), apply_dense(H, u, rows, cols)) < 1e-9 * scale * N);

      Eigen::MatrixXd data = normal_matrix(p, 0.0, {});
      CHECK(max_diff(apply_data_term(p.memory, p.context.mask, u), apply_dense(data, u, rows, cols)) < 1e-9 * scale * N);

      Eigen::MatrixXd reg = Eigen::MatrixXd::Zero(2 * N, 2 * N);
      reg.diagonal() << flat(p.context.regularizer.g).array().square(), flat(p.context.regularizer.g).array().square();
      CHECK(max_diff(apply_reg_term(p.context.regularizer, lambda, u), apply_dense(lambda * reg, u, rows, cols)) < 1e-9 * scale * N);

      const Eigen::MatrixXd V = pair_matrix(p.context.pairs, N);
      Eigen::MatrixXd cons = Eigen::MatrixXd::Zero(2 * N, 2 * N);
      for (int d = 0; d < 2; ++d) cons.block(d * N, d * N, N, N) = gamma[d] * V.transpose() * V;
      CHECK(max_diff(apply_constraint_term(p.context.pairs, gamma, u), apply_dense(cons, u, rows, cols)) < 1e-9 * scale * N);
    }
  }
}

TEST_CASE("one-row data term matches the Toeplitz mask construction") {
  std::mt19937_64 rng(43);
  Problem p = make_problem(rng, 1, 8, 1, 4, 2, 1);
  const Eigen::MatrixXcd P = oracle::toeplitz_1d(p.context.mask.p);
  const Eigen::VectorXcd xh = oracle::vec(p.memory.samples()[0].x_hat[0]);
  const Eigen::MatrixXcd A = xh.asDiagonal() * P;
  const Spectrum u = oracle::random_complex(rng, 1, 8);
  const Eigen::VectorXcd expect = A.adjoint() * (A * oracle::vec(u));
  const Spectrum got = apply_data_term(p.memory, p.context.mask, {u})[0];
  CHECK((oracle::vec(got) - expect).cwiseAbs().maxCoeff() < 1e-10 * (1.0 + expect.cwiseAbs().maxCoeff()));
}

TEST_CASE("operator examples") {
  std::mt19937_64 rng(47);
  Problem p = make_problem(rng, 4, 6, 2, 4, 2, 2);
  const MultiSpectrum zero{Spectrum::Zero(4, 6), Spectrum::Zero(4, 6)};
  CHECK(max_abs(apply_data_term(p.memory, p.context.mask, zero)) == 0.0);

  // Identical samples at half weight each equal one sample.
  std::vector<TrainingSample> twin(2, p.memory.samples()[0]);
  twin[0].weight = twin[1].weight = 0.5;
  const SampleMemory m2 = SampleMemory::from_samples({}, twin);
  const MultiSpectrum u = random_spectra(rng, 2, 4, 6, false);
  CHECK(max_diff(apply_data_term(m2, p.context.mask, u), apply_data_term(p.memory, p.context.mask, u)) < 1e-12 * (1 + max_abs(u)) * 24);

  // Kernel-constant filters are invisible to the constraint term.
  RealGrid w = oracle::random_grid(rng, 4, 6);
  for (const auto& k : p.context.pairs.kernels)
    for (int c : k) w.data()[c] = w.data()[k.front()];
  const std::vector<double> gamma{1.0, 5.0};
  CHECK(max_abs(apply_constraint_term(p.context.pairs, gamma, {sp::forward(w), sp::forward(w)})) < 1e-9);
  CHECK(max_abs(apply_constraint_term(p.context.pairs, std::vector<double>{0.0, 0.0}, u)) == 0.0);

  SpatialRegularizer ones{RealGrid::Ones(4, 6)};
  CHECK(max_diff(apply_reg_term(ones, 0.25, u), [&] {
          MultiSpectrum s = u;
          for (auto& c : s) c *= 0.25;
          return s;
        }()) < 1e-12 * 24);
  CHECK(max_abs(apply_reg_term(p.context.regularizer, 0.0, u)) == 0.0);
}

TEST_CASE("right-hand side") {
  std::mt19937_64 rng(53);
  Problem p = make_problem(rng, 2, 4, 2, 2, 2, 2, 2);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<std::vector<double>> xi(2, std::vector<double>(p.context.pairs.size()));
  for (auto& v : xi)
    for (double& x : v) x = n(rng);
  const MultiSpectrum b = build_rhs(p.memory, p.context.mask, p.context.pairs, xi, p.context.label_hat);
  const Eigen::VectorXd br = data_rhs(p);
  const Eigen::MatrixXd V = pair_matrix(p.context.pairs, 8);
  for (int d = 0; d < 2; ++d) {
    const Eigen::VectorXd s = br.segment(d * 8, 8) - V.transpose() * Eigen::Map<const Eigen::VectorXd>(xi[d].data(), xi[d].size());
    RealGrid g(2, 4);
    Eigen::Map<Eigen::VectorXd>(g.data(), 8) = s;
    CHECK(oracle::max_abs(b[d] - oracle::dft(g)) < 1e-10);
  }

  // Zero features leave only the multiplier part.
  TrainingSample z;
  z.x_hat.assign(2, Spectrum::Zero(2, 4));
  z.weight = 1.0;
  const SampleMemory zm = SampleMemory::from_samples({}, {z});
  const MultiSpectrum bz = build_rhs(zm, p.context.mask, p.context.pairs, xi, p.context.label_hat);
  for (int d = 0; d < 2; ++d)
    CHECK(oracle::max_abs(bz[d] + sp::forward(pair_differences_adjoint(p.context.pairs, xi[d]))) < 1e-12);
}

TEST_CASE("normal operator is self-adjoint, PSD and keeps Hermitian symmetry") {
  std::mt19937_64 rng(59);
  for (int trial = 0; trial < 5; ++trial) {
    Problem p = make_problem(rng, 6, 8, 2, 4, 2, 3, 2, {PenaltyGroup::High, PenaltyGroup::Low, PenaltyGroup::Low});
    const AdmmState st = AdmmState::initial(p.context.penalties, p.context.pairs.size(), SolverConfig{});
    const NormalSystem sys(p.memory, p.context, 0.01, st);
    const MultiSpectrum u = random_spectra(rng, 3, 6, 8, true);
    const MultiSpectrum v = random_spectra(rng, 3, 6, 8, true);
    const MultiSpectrum Au = sys.apply(u), Av = sys.apply(v);
    const std::complex<double> a = inner(Au, v), b = inner(u, Av);
    CHECK(std::abs(a - b) < 1e-8 * (1.0 + std::abs(a)));
    CHECK(inner(Au, u).real() >= -1e-9);
    for (const auto& s : Au) CHECK(oracle::max_abs(oracle::idft(s).imag()) < 1e-8 * (1.0 + oracle::max_abs(s)));
  }
}

TEST_CASE("Krylov solver") {
  SUBCASE("identity operator") {
    std::mt19937_64 rng(61);
    const MultiSpectrum b = random_spectra(rng, 2, 3, 3, false);
    const CgResult r = cg_solve([](const MultiSpectrum& u) { return u; }, b, nullptr, 10, 1e-12);
    CHECK(r.iterations == 1);
    CHECK(r.converged);
    CHECK(max_diff(r.x, b) < 1e-14);
  }
  SUBCASE("Hermitian positive definite 16 x 16") {
    std::mt19937_64 rng(67);
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::MatrixXcd B(16, 16);
    for (Eigen::Index i = 0; i < B.size(); ++i) B.data()[i] = {n(rng), n(rng)};
    const Eigen::MatrixXcd M = B.adjoint() * B + 0.5 * Eigen::MatrixXcd::Identity(16, 16);
    auto op = [&](const MultiSpectrum& u) {
      Spectrum out(4, 4);
      Eigen::Map<Eigen::VectorXcd>(out.data(), 16) = M * Eigen::Map<const Eigen::VectorXcd>(u[0].data(), 16);
      return MultiSpectrum{out};
    };
    const Spectrum b = oracle::random_complex(rng, 4, 4);
    const Eigen::VectorXcd exact = M.ldlt().solve(oracle::vec(b));
    const CgResult r = cg_solve(op, {b}, nullptr, 200, 1e-14);
    CHECK((oracle::vec(r.x[0]) - exact).norm() < 1e-8 * exact.norm());
    for (size_t k = 1; k < r.residual_norms.size(); ++k)
      CHECK(r.residual_norms[k] <= r.residual_norms[k - 1] * (1.0 + 1e-10));

    Spectrum xs(4, 4);
    Eigen::Map<Eigen::VectorXcd>(xs.data(), 16) = exact;
    const MultiSpectrum warm{xs};
    const CgResult w = cg_solve(op, {b}, &warm, 200, 1e-8);
    CHECK(w.iterations == 0);
    CHECK(w.converged);
  }
  SUBCASE("residuals never grow on the tracker operator") {
    std::mt19937_64 rng(71);
    Problem p = make_problem(rng, 8, 8, 4, 4, 2, 2);
    const AdmmState st = AdmmState::initial(p.context.penalties, p.context.pairs.size(), SolverConfig{});
    const NormalSystem sys(p.memory, p.context, 0.01, st);
    const CgResult r = cg_solve(sys, sys.rhs(), nullptr, 60, 1e-14);
    for (size_t k = 1; k < r.residual_norms.size(); ++k)
      CHECK(r.residual_norms[k] <= r.residual_norms[k - 1] * (1.0 + 1e-10));
  }
  SUBCASE("non-finite input") {
    Spectrum b = Spectrum::Ones(2, 2);
    b(0, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(cg_solve([](const MultiSpectrum& u) { return u; }, {b}, nullptr, 5, 1e-9), NumericError);
  }
}

TEST_CASE("multipliers and penalties") {
  ConstraintPairSet s;
  s.rows = 1;
  s.cols = 4;
  s.pairs = {{0, 1}, {2, 3}};
  RealGrid w(1, 4);
  w << 3, 1, 2, 2;
  AdmmState st;
  st.gamma = {0.1};
  st.xi = {{0.0, 0.0}};
  const AdmmState next = update_multipliers(st, s, to_filter({w}));
  CHECK(next.xi[0][0] == doctest::Approx(0.2));
  CHECK(std::abs(next.xi[0][1]) < 1e-15);
  CHECK(next.iteration == st.iteration);

  RealGrid flat_w(1, 4);
  flat_w << 2, 2, -1, -1;
  const AdmmState same = update_multipliers(next, s, to_filter({flat_w}));
  CHECK(std::abs(same.xi[0][0] - next.xi[0][0]) < 1e-15);
  AdmmState off = st;
  off.gamma = {0.0};
  CHECK(update_multipliers(off, s, to_filter({w})).xi[0] == std::vector<double>{0.0, 0.0});

  AdmmState g;
  g.gamma = {0.1, 1000.0, 500.0};
  g.gamma_max = 1000.0;
  g.alpha = 10.0;
  const AdmmState h = update_penalty(g);
  CHECK(h.gamma[0] == doctest::Approx(1.0));
  CHECK(h.gamma[1] == 1000.0);
  CHECK(h.gamma[2] == 1000.0);
  CHECK(h.iteration == 1);

  const AdmmState init = AdmmState::initial({PenaltyGroup::High, PenaltyGroup::Low}, 3, SolverConfig{});
  CHECK(init.gamma[0] == doctest::Approx(0.1));
  CHECK(init.gamma[1] == doctest::Approx(0.3));
  CHECK(init.xi[1].size() == 3);
}

TEST_CASE("CG budget schedule") {
  CHECK(split_cg_budget(200, 3) == std::vector<int>{100, 50, 50});
  CHECK(split_cg_budget(6, 2) == std::vector<int>{3, 3});
  CHECK(split_cg_budget(7, 1) == std::vector<int>{7});
  const SolverConfig c;
  CHECK(admm_schedule(c, TrainingPhase::First) == std::vector<int>{100, 50, 50});
  CHECK(admm_schedule(c, TrainingPhase::Update) == std::vector<int>{3, 3});
  CHECK_THROWS(split_cg_budget(5, 0));
}

TEST_CASE("without constraints ADMM is the unconstrained least-squares solve") {
  std::mt19937_64 rng(73);
  for (auto [rows, cols, depth] : std::vector<std::array<int, 3>>{{1, 8, 1}, {1, 8, 2}, {3, 4, 2}}) {
    Problem p = make_problem(rng, rows, cols, 1, 3, 1, depth, 2);
    CHECK(p.context.pairs.empty());
    const AdmmResult r = admm_solve(p.memory, p.context, extended(p, 1), TrainingPhase::First);
    CHECK(rel_error(r.filter.spatial(), constrained_minimizer(p, 1e-2)) < 1e-8);
  }
}

TEST_CASE("with constraints ADMM reaches the constrained minimizer") {
  std::mt19937_64 rng(79);
  for (auto [rows, cols, depth] : std::vector<std::array<int, 3>>{{1, 8, 1}, {1, 16, 2}, {4, 4, 1}}) {
    CAPTURE(cols);
    Problem p = make_problem(rng, rows, cols, rows == 1 ? 1 : 2, cols / 4, 2, depth);
    REQUIRE_FALSE(p.context.pairs.empty());
    const SolverConfig cfg = extended(p);
    const AdmmResult r = admm_solve(p.memory, p.context, cfg, TrainingPhase::First);
    const MultiGrid ref = constrained_minimizer(p, cfg.lambda);
    CHECK(rel_error(r.filter.spatial(), ref) < 1e-3);
    CHECK(r.constraint_residual <= 1e-4);

    // The outer losses climb toward the constrained optimum from below.
    const double target = objective_eval(to_filter(ref), p.memory, p.context, cfg.lambda).loss;
    CHECK(r.trace.loss.back() == doctest::Approx(target).epsilon(1e-6));
    for (double l : r.trace.loss) CHECK(l <= target * (1.0 + 1e-6));
  }
}

TEST_CASE("loss trace without constraints does not increase") {
  std::mt19937_64 rng(83);
  Problem p = make_problem(rng, 6, 6, 2, 2, 1, 2);
  const AdmmResult r = admm_solve(p.memory, p.context, SolverConfig{}, TrainingPhase::First);
  REQUIRE(r.trace.loss.size() == 3);
  for (size_t k = 1; k < r.trace.loss.size(); ++k) CHECK(r.trace.loss[k] <= r.trace.loss[k - 1] + 1e-6);
}

TEST_CASE("doubling lambda does not grow the regularized filter norm") {
  std::mt19937_64 rng(89);
  for (int e : {1, 2}) {
    Problem p = make_problem(rng, 1, 16, 1, 4, e, 2);
    SolverConfig cfg = extended(p);
    auto reg_norm = [&](double lambda) {
      cfg.lambda = lambda;
      const MultiGrid w = admm_solve(p.memory, p.context, cfg, TrainingPhase::First).filter.spatial();
      double s = 0.0;
      for (const auto& c : w) s += (p.context.regularizer.g * c).square().sum();
      return std::sqrt(s);
    };
    for (double lambda : {1e-3, 1e-2, 1e-1}) CHECK(reg_norm(2 * lambda) <= reg_norm(lambda) * (1.0 + 1e-6));
  }
}

TEST_CASE("objective") {
  std::mt19937_64 rng(97);
  Problem p = make_problem(rng, 5, 6, 2, 2, 2, 2, 3);
  const ObjectiveValue z = objective_eval(SpectralFilter::zeros(2, 5, 6), p.memory, p.context, 0.01);
  CHECK(z.loss == doctest::Approx(0.5 * p.context.label.square().sum()));
  CHECK(z.constraint_residual == 0.0);
  for (int trial = 0; trial < 5; ++trial) {
    const SpectralFilter f = to_filter({oracle::random_grid(rng, 5, 6), oracle::random_grid(rng, 5, 6)});
    const double spatial = objective_eval(f, p.memory, p.context, 0.05).loss;
    CHECK(objective_eval_fourier(f, p.memory, p.context, 0.05) == doctest::Approx(spatial).epsilon(1e-8));
    // Direct sum from the dense design matrices.
    Eigen::VectorXd w(60);
    const MultiGrid sw = f.spatial();
    w << flat(sw[0]), flat(sw[1]);
    double loss = 0.0;
    for (int t = 0; t < 3; ++t) loss += 0.5 * p.mu[t] * (flat(p.context.label) - design(p, t) * w).squaredNorm();
    for (const auto& c : sw) loss += 0.025 * (p.context.regularizer.g * c).square().sum();
    CHECK(spatial == doctest::Approx(loss).epsilon(1e-10));
  }
}

TEST_CASE("divergence guard") {
  std::mt19937_64 rng(101);
  Problem p = make_problem(rng, 1, 8, 1, 4, 2, 1);
  SolverConfig cfg;
  cfg.divergence_factor = 1e-9;
  CHECK_THROWS_AS(admm_solve(p.memory, p.context, cfg, TrainingPhase::First), NumericError);
}

TEST_CASE("non-Hermitian filters have no spatial form") {
  std::mt19937_64 rng(103);
  SpectralFilter f;
  f.w_hat.push_back(oracle::random_complex(rng, 4, 4));
  CHECK_THROWS_AS(f.spatial(), NumericError);
}

}
