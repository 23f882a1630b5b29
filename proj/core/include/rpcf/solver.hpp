#pragma once

#include <functional>
#include <span>
#include <vector>

#include "rpcf/constraints.hpp"
#include "rpcf/features.hpp"
#include "rpcf/memory.hpp"
#include "rpcf/spectral.hpp"

namespace rpcf {

struct SolverConfig {
  double lambda = 1e-2;
  double gamma1 = 0.1;       // high-level channel group
  double gamma_ratio = 3.0;  // gamma2 = gamma_ratio * gamma1 for the other groups
  double gamma_max = 1000.0;
  double alpha = 10.0;
  int admm_iters_first = 3;
  int admm_iters_update = 2;
  int cg_budget_first = 200;
  int cg_budget_update = 6;
  double cg_tol = 1e-6;
  bool reset_multipliers = false;
  double divergence_factor = 10.0;
};

/// Everything about the filter grid that does not change between frames.
struct FilterContext {
  CropMask mask;
  SpatialRegularizer regularizer;
  ConstraintPairSet pairs;
  RealGrid label;
  Spectrum label_hat;
  std::vector<PenaltyGroup> penalties;  // one per channel

  int depth() const { return static_cast<int>(penalties.size()); }
};

FilterContext make_filter_context(CropMask mask, SpatialRegularizer regularizer,
                                  ConstraintPairSet pairs, RealGrid label,
                                  std::vector<PenaltyGroup> penalties);

struct SpectralFilter {
  MultiSpectrum w_hat;

  static SpectralFilter zeros(int depth, Eigen::Index rows, Eigen::Index cols);
  int depth() const { return static_cast<int>(w_hat.size()); }
  /// Spatial filter per channel; throws NumericError if a channel is not
  /// Hermitian-symmetric.
  MultiGrid spatial() const;
};

struct AdmmState {
  std::vector<std::vector<double>> xi;  // one multiplier vector (length K) per channel
  std::vector<double> gamma;            // per channel
  double gamma_max = 1000.0;
  double alpha = 10.0;
  int iteration = 0;

  /// xi = 0; gamma1 for High channels, gamma_ratio * gamma1 for the rest.
  static AdmmState initial(const std::vector<PenaltyGroup>& penalties, int constraint_count,
                           const SolverConfig& config);
};

// Terms of the normal-equation operator. All act on complex spectra of any
// symmetry and return D spectra.

/// sum_t mu_t P (conj(x_d^t) . sum_j x_j^t . P u_j), masks applied in space.
MultiSpectrum apply_data_term(const SampleMemory& memory, const CropMask& mask,
                              const MultiSpectrum& u);
/// F(gamma_d V^T V F^-1 u_d).
MultiSpectrum apply_constraint_term(const ConstraintPairSet& pairs, std::span<const double> gamma,
                                    const MultiSpectrum& u);
/// lambda F(g . g . F^-1 u_d).
MultiSpectrum apply_reg_term(const SpatialRegularizer& regularizer, double lambda,
                             const MultiSpectrum& u);
/// sum_t mu_t P (conj(x_d^t) . y) - F(V^T xi_d).
MultiSpectrum build_rhs(const SampleMemory& memory, const CropMask& mask,
                        const ConstraintPairSet& pairs,
                        const std::vector<std::vector<double>>& xi, const Spectrum& label_hat);

/// The full left-hand side for fixed multipliers and penalties.
class NormalSystem {
 public:
  NormalSystem(const SampleMemory& memory, const FilterContext& context, double lambda,
               const AdmmState& state);

  MultiSpectrum apply(const MultiSpectrum& u) const;
  MultiSpectrum rhs() const;

 private:
  const SampleMemory& memory_;
  const FilterContext& context_;
  double lambda_;
  const AdmmState& state_;
};

using LinearOperator = std::function<MultiSpectrum(const MultiSpectrum&)>;

struct CgResult {
  MultiSpectrum x;
  int iterations = 0;
  std::vector<double> residual_norms;  // entry 0 is the initial residual
  bool converged = false;
};

/// Krylov solve of a Hermitian positive definite system with the
/// conjugate-residual recurrences (one operator application per iteration,
/// residual norm nonincreasing). Stops after max_iters or when
/// ||r|| / ||rhs|| < tol. `warm_start` seeds the initial iterate.
CgResult cg_solve(const LinearOperator& op, const MultiSpectrum& rhs,
                  const MultiSpectrum* warm_start, int max_iters, double tol);
CgResult cg_solve(const NormalSystem& system, const MultiSpectrum& rhs,
                  const SpectralFilter* warm_start, int max_iters, double tol);

/// xi_d += gamma_d * (w_d(i) - w_d(j)) for every pair.
AdmmState update_multipliers(AdmmState state, const ConstraintPairSet& pairs,
                             const SpectralFilter& filter);
/// gamma_d = min(gamma_max, alpha * gamma_d); iteration += 1.
AdmmState update_penalty(AdmmState state);

enum class TrainingPhase { First, Update };

/// CG iterations per outer ADMM iteration.
std::vector<int> split_cg_budget(int total, int outer_iterations);
std::vector<int> admm_schedule(const SolverConfig& config, TrainingPhase phase);

struct AdmmTrace {
  std::vector<double> loss;                 // after each outer iteration
  std::vector<double> constraint_residual;  // relative, after each outer iteration
  std::vector<int> cg_iterations;
  std::vector<double> cg_initial_residual;
};

struct AdmmResult {
  SpectralFilter filter;
  AdmmState state;
  AdmmTrace trace;
  double constraint_residual = 0.0;  // relative, final
};

/// Alternates a CG solve for the filter with multiplier and penalty updates,
/// once per entry of `cg_schedule`. Starts from warm_filter (or zero) and
/// warm_state (or AdmmState::initial). Throws NumericError when the loss
/// grows by more than divergence_factor between outer iterations.
AdmmResult admm_solve(const SampleMemory& memory, const FilterContext& context,
                      const SolverConfig& config, const std::vector<int>& cg_schedule,
                      const SpectralFilter* warm_filter = nullptr,
                      const AdmmState* warm_state = nullptr);
AdmmResult admm_solve(const SampleMemory& memory, const FilterContext& context,
                      const SolverConfig& config, TrainingPhase phase,
                      const SpectralFilter* warm_filter = nullptr,
                      const AdmmState* warm_state = nullptr);

struct ObjectiveValue {
  double loss = 0.0;
  double constraint_residual = 0.0;  // max |w_d(i) - w_d(j)|
};

/// sum_t mu_t [1/2 ||y - sum_d (p . w_d) * x_d^t||^2] + lambda/2 sum_d ||g . w_d||^2,
/// evaluated in space with direct circular sums.
ObjectiveValue objective_eval(const SpectralFilter& filter, const SampleMemory& memory,
                              const FilterContext& context, double lambda);
ObjectiveValue objective_eval(const SpectralFilter& filter, const MultiSpectrum& sample_hat,
                              const FilterContext& context, double lambda);
/// Same loss through the Fourier-domain expression.
double objective_eval_fourier(const SpectralFilter& filter, const SampleMemory& memory,
                              const FilterContext& context, double lambda);

/// Largest relative within-kernel discrepancy over all channels.
double relative_constraint_residual(const SpectralFilter& filter, const ConstraintPairSet& pairs);

/// Response spectrum sum_d z_d . w_d for a test sample.
Spectrum response_spectrum(const MultiSpectrum& sample_hat, const SpectralFilter& filter);

}  // namespace rpcf
