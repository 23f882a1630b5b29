#pragma once

#include <vector>

#include <Eigen/Dense>

#include "rpcf/constraints.hpp"
#include "rpcf/solver.hpp"

// Dense reference constructions. Everything here forms explicit matrices and
// is only meant for grids of a few dozen cells.
namespace rpcf::dense {

/// Unnormalized 2-D DFT as an (HW x HW) matrix acting on row-major grids.
Eigen::MatrixXcd dft_matrix(int rows, int cols);

/// Matrix with entries m_hat((k - l) mod (H, W)) / (HW): multiplication by
/// the grid m in space, seen from the Fourier side.
Eigen::MatrixXcd toeplitz(const RealGrid& m);

/// Channel spectra stacked into one vector, channel-major.
Eigen::VectorXcd stack(const MultiSpectrum& u);
MultiSpectrum unstack(const Eigen::VectorXcd& v, int depth, int rows, int cols);

/// Fourier-side normal-equation blocks, (D HW) square.
Eigen::MatrixXcd data_term(const SampleMemory& memory, const CropMask& mask);
Eigen::MatrixXcd constraint_term(const ConstraintPairSet& pairs, const std::vector<double>& gamma,
                                 int depth);
Eigen::MatrixXcd reg_term(const SpatialRegularizer& regularizer, double lambda, int depth);

/// Circulant matrix C with (C v) = x * v (circular convolution).
Eigen::MatrixXd convolution_matrix(const RealGrid& x);

/// Pair-difference matrix V (K x HW): (V w)_k = w(i_k) - w(j_k).
Eigen::MatrixXd pair_matrix(const ConstraintPairSet& pairs);

/// Minimizer of sum_t mu_t 1/2 ||y - sum_d (p . w_d) * x_d^t||^2 + lambda/2 sum_d ||g . w_d||^2
/// subject to V w_d = 0 for every channel, from the KKT system. Samples are
/// spatial grids, one MultiGrid per sample.
MultiGrid constrained_least_squares(const std::vector<MultiGrid>& samples,
                                    const std::vector<double>& weights, const CropMask& mask,
                                    const SpatialRegularizer& regularizer,
                                    const ConstraintPairSet& pairs, const RealGrid& label,
                                    double lambda);

}  // namespace rpcf::dense
