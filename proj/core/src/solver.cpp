#include "rpcf/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rpcf {
namespace {

using cd = std::complex<double>;

void check_dims(const MultiSpectrum& u, Eigen::Index rows, Eigen::Index cols, const char* who) {
  for (const auto& ch : u)
    if (ch.rows() != rows || ch.cols() != cols) {
      std::ostringstream msg;
      msg << who << ": spectrum is " << ch.rows() << "x" << ch.cols() << ", expected " << rows
          << "x" << cols;
      throw std::invalid_argument(msg.str());
    }
}

// V^T V applied to a complex spatial grid (real and imaginary parts alike).
void add_vtv(const ConstraintPairSet& pairs, double gamma, const Spectrum& u, Spectrum& out) {
  const cd* in = u.data();
  cd* o = out.data();
  for (const auto& [i, j] : pairs.pairs) {
    const cd d = gamma * (in[i] - in[j]);
    o[i] += d;
    o[j] -= d;
  }
}

double dot_real(const MultiSpectrum& a, const MultiSpectrum& b) {
  double s = 0.0;
  for (size_t d = 0; d < a.size(); ++d) s += (a[d].conjugate() * b[d]).real().sum();
  return s;
}

double norm(const MultiSpectrum& a) { return std::sqrt(dot_real(a, a)); }

// a += s * b
void axpy(MultiSpectrum& a, double s, const MultiSpectrum& b) {
  for (size_t d = 0; d < a.size(); ++d) a[d] += s * b[d];
}

// a = b + s * a
void xpay(MultiSpectrum& a, double s, const MultiSpectrum& b) {
  for (size_t d = 0; d < a.size(); ++d) a[d] = b[d] + s * a[d];
}

MultiSpectrum zeros_like(const MultiSpectrum& u) {
  MultiSpectrum z;
  z.reserve(u.size());
  for (const auto& ch : u) z.push_back(Spectrum::Zero(ch.rows(), ch.cols()));
  return z;
}

// Projects onto spectra of real grids.
MultiSpectrum symmetrize(const MultiSpectrum& u) {
  MultiSpectrum out;
  out.reserve(u.size());
  for (const auto& ch : u) {
    const RealGrid re = spectral::inverse_complex(ch).real();
    out.push_back(spectral::forward(re));
  }
  return out;
}

double channel_energy(const Spectrum& s) { return s.abs2().sum(); }

}  // namespace

FilterContext make_filter_context(CropMask mask, SpatialRegularizer regularizer,
                                  ConstraintPairSet pairs, RealGrid label,
                                  std::vector<PenaltyGroup> penalties) {
  const auto H = label.rows(), W = label.cols();
  if (mask.p.rows() != H || mask.p.cols() != W || regularizer.g.rows() != H ||
      regularizer.g.cols() != W || pairs.rows != H || pairs.cols != W)
    throw std::invalid_argument("make_filter_context: grids differ in size");
  if (penalties.empty()) throw std::invalid_argument("make_filter_context: no channels");
  FilterContext ctx;
  ctx.label_hat = spectral::forward(label);
  ctx.mask = std::move(mask);
  ctx.regularizer = std::move(regularizer);
  ctx.pairs = std::move(pairs);
  ctx.label = std::move(label);
  ctx.penalties = std::move(penalties);
  return ctx;
}

SpectralFilter SpectralFilter::zeros(int depth, Eigen::Index rows, Eigen::Index cols) {
  SpectralFilter f;
  f.w_hat.assign(depth, Spectrum::Zero(rows, cols));
  return f;
}

MultiGrid SpectralFilter::spatial() const {
  MultiGrid out;
  out.reserve(w_hat.size());
  for (const auto& ch : w_hat) out.push_back(spectral::inverse(ch));
  return out;
}

AdmmState AdmmState::initial(const std::vector<PenaltyGroup>& penalties, int constraint_count,
                             const SolverConfig& config) {
  if (!(config.gamma1 > 0.0) || !(config.gamma_max >= config.gamma1) || !(config.alpha >= 1.0))
    throw std::invalid_argument("AdmmState: need 0 < gamma1 <= gamma_max and alpha >= 1");
  AdmmState s;
  s.gamma_max = config.gamma_max;
  s.alpha = config.alpha;
  for (PenaltyGroup g : penalties) {
    const double gamma = g == PenaltyGroup::High ? config.gamma1 : config.gamma_ratio * config.gamma1;
    s.gamma.push_back(std::min(gamma, config.gamma_max));
    s.xi.emplace_back(static_cast<size_t>(constraint_count), 0.0);
  }
  return s;
}

MultiSpectrum apply_data_term(const SampleMemory& memory, const CropMask& mask,
                              const MultiSpectrum& u) {
  if (memory.empty()) throw std::invalid_argument("apply_data_term: empty memory");
  if (static_cast<int>(u.size()) != memory.depth())
    throw std::invalid_argument("apply_data_term: channel count mismatch");
  check_dims(u, memory.rows(), memory.cols(), "apply_data_term");

  MultiSpectrum pu;
  pu.reserve(u.size());
  for (const auto& ch : u) pu.push_back(spectral::mask_multiply(mask.p, ch));

  MultiSpectrum acc = zeros_like(u);
  Spectrum s(memory.rows(), memory.cols());
  for (const auto& t : memory.samples()) {
    s.setZero();
    for (size_t j = 0; j < u.size(); ++j) s += t.x_hat[j] * pu[j];
    for (size_t d = 0; d < u.size(); ++d) acc[d] += t.weight * (t.x_hat[d].conjugate() * s);
  }
  for (auto& ch : acc) ch = spectral::mask_multiply(mask.p, ch);
  return acc;
}

MultiSpectrum apply_constraint_term(const ConstraintPairSet& pairs, std::span<const double> gamma,
                                    const MultiSpectrum& u) {
  if (gamma.size() != u.size())
    throw std::invalid_argument("apply_constraint_term: one penalty per channel required");
  check_dims(u, pairs.rows, pairs.cols, "apply_constraint_term");
  MultiSpectrum out;
  out.reserve(u.size());
  for (size_t d = 0; d < u.size(); ++d) {
    const Spectrum sp = spectral::inverse_complex(u[d]);
    Spectrum acc = Spectrum::Zero(sp.rows(), sp.cols());
    add_vtv(pairs, gamma[d], sp, acc);
    out.push_back(spectral::forward(acc));
  }
  return out;
}

MultiSpectrum apply_reg_term(const SpatialRegularizer& regularizer, double lambda,
                             const MultiSpectrum& u) {
  check_dims(u, regularizer.g.rows(), regularizer.g.cols(), "apply_reg_term");
  const RealGrid g2 = lambda * regularizer.g.square();
  MultiSpectrum out;
  out.reserve(u.size());
  for (const auto& ch : u) out.push_back(spectral::mask_multiply(g2, ch));
  return out;
}

MultiSpectrum build_rhs(const SampleMemory& memory, const CropMask& mask,
                        const ConstraintPairSet& pairs,
                        const std::vector<std::vector<double>>& xi, const Spectrum& label_hat) {
  if (memory.empty()) throw std::invalid_argument("build_rhs: empty memory");
  const int D = memory.depth();
  if (label_hat.rows() != memory.rows() || label_hat.cols() != memory.cols())
    throw std::invalid_argument("build_rhs: label size differs from samples");
  if (!xi.empty() && static_cast<int>(xi.size()) != D)
    throw std::invalid_argument("build_rhs: one multiplier vector per channel required");

  MultiSpectrum out;
  out.reserve(D);
  for (int d = 0; d < D; ++d) {
    Spectrum acc = Spectrum::Zero(memory.rows(), memory.cols());
    for (const auto& t : memory.samples()) acc += t.weight * (t.x_hat[d].conjugate() * label_hat);
    acc = spectral::mask_multiply(mask.p, acc);
    if (!xi.empty() && !pairs.empty())
      acc -= spectral::forward(pair_differences_adjoint(pairs, xi[d]));
    out.push_back(std::move(acc));
  }
  return out;
}

NormalSystem::NormalSystem(const SampleMemory& memory, const FilterContext& context, double lambda,
                           const AdmmState& state)
    : memory_(memory), context_(context), lambda_(lambda), state_(state) {
  if (memory.empty()) throw std::invalid_argument("NormalSystem: empty memory");
  if (memory.depth() != context.depth() || static_cast<int>(state.gamma.size()) != context.depth())
    throw std::invalid_argument("NormalSystem: channel count mismatch");
  if (memory.rows() != context.label.rows() || memory.cols() != context.label.cols())
    throw std::invalid_argument("NormalSystem: sample size differs from filter grid");
}

MultiSpectrum NormalSystem::apply(const MultiSpectrum& u) const {
  const size_t D = u.size();
  if (static_cast<int>(D) != context_.depth())
    throw std::invalid_argument("NormalSystem::apply: channel count mismatch");
  check_dims(u, memory_.rows(), memory_.cols(), "NormalSystem::apply");
  const RealGrid& p = context_.mask.p;
  const RealGrid g2 = lambda_ * context_.regularizer.g.square();

  // One inverse per channel serves the mask, regularizer and constraint terms.
  MultiSpectrum spatial, pu;
  spatial.reserve(D);
  pu.reserve(D);
  for (const auto& ch : u) {
    spatial.push_back(spectral::inverse_complex(ch));
    pu.push_back(spectral::forward(Spectrum(spatial.back() * p.cast<cd>())));
  }

  MultiSpectrum acc = zeros_like(u);
  Spectrum s(memory_.rows(), memory_.cols());
  for (const auto& t : memory_.samples()) {
    s.setZero();
    for (size_t j = 0; j < D; ++j) s += t.x_hat[j] * pu[j];
    for (size_t d = 0; d < D; ++d) acc[d] += t.weight * (t.x_hat[d].conjugate() * s);
  }

  MultiSpectrum out;
  out.reserve(D);
  for (size_t d = 0; d < D; ++d) {
    Spectrum total = spectral::inverse_complex(acc[d]) * p.cast<cd>() + spatial[d] * g2.cast<cd>();
    if (!context_.pairs.empty()) add_vtv(context_.pairs, state_.gamma[d], spatial[d], total);
    out.push_back(spectral::forward(total));
  }
  return out;
}

MultiSpectrum NormalSystem::rhs() const {
  return build_rhs(memory_, context_.mask, context_.pairs, state_.xi, context_.label_hat);
}

CgResult cg_solve(const LinearOperator& op, const MultiSpectrum& rhs,
                  const MultiSpectrum* warm_start, int max_iters, double tol) {
  if (max_iters < 0) throw std::invalid_argument("cg_solve: max_iters must be >= 0");
  CgResult res;
  const double bnorm = norm(rhs);
  if (!std::isfinite(bnorm)) throw NumericError("cg_solve: right-hand side is not finite");

  if (warm_start) {
    if (warm_start->size() != rhs.size())
      throw std::invalid_argument("cg_solve: warm start has the wrong channel count");
    res.x = *warm_start;
  } else {
    res.x = zeros_like(rhs);
  }
  if (bnorm == 0.0) {
    res.x = zeros_like(rhs);
    res.residual_norms.push_back(0.0);
    res.converged = true;
    return res;
  }

  MultiSpectrum r = rhs;
  if (warm_start) axpy(r, -1.0, op(res.x));
  double rnorm = norm(r);
  if (!std::isfinite(rnorm)) throw NumericError("cg_solve: initial residual is not finite");
  res.residual_norms.push_back(rnorm);
  if (rnorm / bnorm < tol) {
    res.converged = true;
    return res;
  }
  if (max_iters == 0) return res;

  MultiSpectrum ar = op(r);
  MultiSpectrum p = r;
  MultiSpectrum ap = ar;
  double r_ar = dot_real(r, ar);

  for (int k = 0; k < max_iters; ++k) {
    const double ap_ap = dot_real(ap, ap);
    if (!(r_ar > 0.0) || !(ap_ap > 0.0)) break;  // breakdown: stagnated or not positive definite
    const double a = r_ar / ap_ap;
    axpy(res.x, a, p);
    axpy(r, -a, ap);
    rnorm = norm(r);
    ++res.iterations;
    if (!std::isfinite(rnorm) || !std::isfinite(a)) {
      std::ostringstream msg;
      msg << "cg_solve: non-finite value at iteration " << res.iterations;
      throw NumericError(msg.str());
    }
    res.residual_norms.push_back(rnorm);
    if (rnorm / bnorm < tol) {
      res.converged = true;
      break;
    }
    if (k + 1 == max_iters) break;
    ar = op(r);
    const double r_ar_next = dot_real(r, ar);
    const double beta = r_ar_next / r_ar;
    r_ar = r_ar_next;
    xpay(p, beta, r);
    xpay(ap, beta, ar);
  }
  return res;
}

CgResult cg_solve(const NormalSystem& system, const MultiSpectrum& rhs,
                  const SpectralFilter* warm_start, int max_iters, double tol) {
  return cg_solve([&system](const MultiSpectrum& u) { return system.apply(u); }, rhs,
                  warm_start ? &warm_start->w_hat : nullptr, max_iters, tol);
}

AdmmState update_multipliers(AdmmState state, const ConstraintPairSet& pairs,
                             const SpectralFilter& filter) {
  if (state.gamma.size() != filter.w_hat.size())
    throw std::invalid_argument("update_multipliers: channel count mismatch");
  if (state.xi.size() != filter.w_hat.size()) state.xi.assign(filter.w_hat.size(), {});
  if (pairs.empty()) return state;
  for (size_t d = 0; d < filter.w_hat.size(); ++d) {
    auto& xi = state.xi[d];
    if (xi.size() != pairs.pairs.size()) xi.assign(pairs.pairs.size(), 0.0);
    if (state.gamma[d] == 0.0) continue;
    const auto diff = pair_differences(pairs, spectral::inverse(filter.w_hat[d]));
    for (size_t k = 0; k < xi.size(); ++k) xi[k] += state.gamma[d] * diff[k];
  }
  return state;
}

AdmmState update_penalty(AdmmState state) {
  for (double& g : state.gamma) g = std::min(state.gamma_max, state.alpha * g);
  ++state.iteration;
  return state;
}

std::vector<int> split_cg_budget(int total, int outer_iterations) {
  if (outer_iterations < 1) throw std::invalid_argument("split_cg_budget: need >= 1 outer iteration");
  if (total < 0) throw std::invalid_argument("split_cg_budget: negative budget");
  std::vector<int> out(static_cast<size_t>(outer_iterations), 0);
  if (outer_iterations == 1) {
    out[0] = total;
    return out;
  }
  // Half the budget up front, where the filter moves furthest from its start.
  out[0] = (total + 1) / 2;
  const int rest = total - out[0];
  const int n = outer_iterations - 1;
  for (int i = 0; i < n; ++i) out[static_cast<size_t>(i) + 1] = rest / n + (i < rest % n ? 1 : 0);
  return out;
}

std::vector<int> admm_schedule(const SolverConfig& config, TrainingPhase phase) {
  return phase == TrainingPhase::First
             ? split_cg_budget(config.cg_budget_first, config.admm_iters_first)
             : split_cg_budget(config.cg_budget_update, config.admm_iters_update);
}

AdmmResult admm_solve(const SampleMemory& memory, const FilterContext& context,
                      const SolverConfig& config, const std::vector<int>& cg_schedule,
                      const SpectralFilter* warm_filter, const AdmmState* warm_state) {
  if (memory.empty()) throw std::invalid_argument("admm_solve: empty memory");
  const int D = context.depth();
  if (memory.depth() != D) throw std::invalid_argument("admm_solve: channel count mismatch");

  AdmmResult out;
  if (warm_state && !config.reset_multipliers) {
    out.state = *warm_state;
    if (static_cast<int>(out.state.gamma.size()) != D)
      throw std::invalid_argument("admm_solve: warm state has the wrong channel count");
  } else {
    out.state = AdmmState::initial(context.penalties, context.pairs.size(), config);
  }
  if (warm_filter) {
    if (warm_filter->depth() != D)
      throw std::invalid_argument("admm_solve: warm filter has the wrong channel count");
    out.filter = *warm_filter;
  } else {
    out.filter = SpectralFilter::zeros(D, memory.rows(), memory.cols());
  }

  const double zero_loss = objective_eval_fourier(SpectralFilter::zeros(D, memory.rows(), memory.cols()),
                                                  memory, context, config.lambda);
  double prev = objective_eval_fourier(out.filter, memory, context, config.lambda);

  for (int budget : cg_schedule) {
    const NormalSystem system(memory, context, config.lambda, out.state);
    const CgResult cg = cg_solve(system, system.rhs(), &out.filter, budget, config.cg_tol);
    out.filter.w_hat = symmetrize(cg.x);
    out.state = update_penalty(update_multipliers(std::move(out.state), context.pairs, out.filter));

    const double loss = objective_eval_fourier(out.filter, memory, context, config.lambda);
    out.trace.loss.push_back(loss);
    out.trace.constraint_residual.push_back(relative_constraint_residual(out.filter, context.pairs));
    out.trace.cg_iterations.push_back(cg.iterations);
    out.trace.cg_initial_residual.push_back(cg.residual_norms.front());
    if (!std::isfinite(loss) || loss > config.divergence_factor * prev + 1e-12 * zero_loss) {
      std::ostringstream msg;
      msg << "admm_solve: objective grew from " << prev << " to " << loss << " at outer iteration "
          << out.trace.loss.size();
      throw NumericError(msg.str());
    }
    prev = loss;
  }
  out.constraint_residual = relative_constraint_residual(out.filter, context.pairs);
  return out;
}

AdmmResult admm_solve(const SampleMemory& memory, const FilterContext& context,
                      const SolverConfig& config, TrainingPhase phase,
                      const SpectralFilter* warm_filter, const AdmmState* warm_state) {
  return admm_solve(memory, context, config, admm_schedule(config, phase), warm_filter, warm_state);
}

ObjectiveValue objective_eval(const SpectralFilter& filter, const SampleMemory& memory,
                              const FilterContext& context, double lambda) {
  if (memory.empty()) throw std::invalid_argument("objective_eval: empty memory");
  const int H = static_cast<int>(context.label.rows());
  const int W = static_cast<int>(context.label.cols());
  const int D = filter.depth();
  if (memory.depth() != D) throw std::invalid_argument("objective_eval: channel count mismatch");

  const MultiGrid w = filter.spatial();
  // Nonzeros of p . w_d as (row, col, value) per channel.
  struct Tap {
    int r, c;
    double v;
  };
  std::vector<std::vector<Tap>> taps(static_cast<size_t>(D));
  for (int d = 0; d < D; ++d)
    for (int r = 0; r < H; ++r)
      for (int c = 0; c < W; ++c) {
        const double v = context.mask.p(r, c) * w[static_cast<size_t>(d)](r, c);
        if (v != 0.0) taps[static_cast<size_t>(d)].push_back({r, c, v});
      }

  ObjectiveValue out;
  for (const auto& t : memory.samples()) {
    RealGrid resp = RealGrid::Zero(H, W);
    for (int d = 0; d < D; ++d) {
      const RealGrid x = spectral::inverse(t.x_hat[static_cast<size_t>(d)]);
      for (const Tap& tap : taps[static_cast<size_t>(d)])
        for (int m = 0; m < H; ++m) {
          const int xm = ((m - tap.r) % H + H) % H;
          for (int n = 0; n < W; ++n) resp(m, n) += tap.v * x(xm, ((n - tap.c) % W + W) % W);
        }
    }
    out.loss += t.weight * 0.5 * (context.label - resp).square().sum();
  }
  for (int d = 0; d < D; ++d) {
    out.loss += 0.5 * lambda * (context.regularizer.g * w[static_cast<size_t>(d)]).square().sum();
    for (double v : pair_differences(context.pairs, w[static_cast<size_t>(d)]))
      out.constraint_residual = std::max(out.constraint_residual, std::abs(v));
  }
  return out;
}

ObjectiveValue objective_eval(const SpectralFilter& filter, const MultiSpectrum& sample_hat,
                              const FilterContext& context, double lambda) {
  SampleMemory single;
  single.insert({sample_hat, 1.0, 0});
  return objective_eval(filter, single, context, lambda);
}

double objective_eval_fourier(const SpectralFilter& filter, const SampleMemory& memory,
                              const FilterContext& context, double lambda) {
  if (memory.empty()) throw std::invalid_argument("objective_eval_fourier: empty memory");
  const double N = static_cast<double>(context.label.size());
  MultiSpectrum pw;
  pw.reserve(filter.w_hat.size());
  for (const auto& ch : filter.w_hat) pw.push_back(spectral::mask_multiply(context.mask.p, ch));

  double loss = 0.0;
  for (const auto& t : memory.samples()) {
    Spectrum r = context.label_hat;
    for (size_t d = 0; d < pw.size(); ++d) r -= t.x_hat[d] * pw[d];
    loss += t.weight * 0.5 * channel_energy(r) / N;
  }
  for (const auto& ch : filter.w_hat)
    loss += 0.5 * lambda * channel_energy(spectral::mask_multiply(context.regularizer.g, ch)) / N;
  return loss;
}

double relative_constraint_residual(const SpectralFilter& filter, const ConstraintPairSet& pairs) {
  if (pairs.empty()) return 0.0;
  double worst = 0.0;
  for (const auto& ch : filter.w_hat)
    worst = std::max(worst, relative_pair_discrepancy(pairs, spectral::inverse(ch)));
  return worst;
}

Spectrum response_spectrum(const MultiSpectrum& sample_hat, const SpectralFilter& filter) {
  if (sample_hat.size() != filter.w_hat.size() || sample_hat.empty())
    throw std::invalid_argument("response_spectrum: channel count mismatch");
  Spectrum r = Spectrum::Zero(sample_hat.front().rows(), sample_hat.front().cols());
  for (size_t d = 0; d < sample_hat.size(); ++d) r += sample_hat[d] * filter.w_hat[d];
  return r;
}

}  // namespace rpcf
