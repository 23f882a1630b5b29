#include "rpcf/selfcheck/dense.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rpcf::dense {
namespace {

using cd = std::complex<double>;

Eigen::VectorXd flatten(const RealGrid& g) {
  return Eigen::Map<const Eigen::VectorXd>(g.data(), g.size());
}

}  // namespace

Eigen::MatrixXcd dft_matrix(int rows, int cols) {
  const int n = rows * cols;
  Eigen::MatrixXcd F(n, n);
  for (int k = 0; k < n; ++k) {
    const int ku = k / cols, kv = k % cols;
    for (int m = 0; m < n; ++m) {
      const int mu = m / cols, mv = m % cols;
      const double phase = -2.0 * std::numbers::pi *
                           (static_cast<double>(ku * mu) / rows + static_cast<double>(kv * mv) / cols);
      F(k, m) = std::polar(1.0, phase);
    }
  }
  return F;
}

Eigen::MatrixXcd toeplitz(const RealGrid& m) {
  const int H = static_cast<int>(m.rows()), W = static_cast<int>(m.cols());
  const int n = H * W;
  const Eigen::VectorXcd m_hat = dft_matrix(H, W) * flatten(m).cast<cd>();
  Eigen::MatrixXcd T(n, n);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      const int du = ((k / W - l / W) % H + H) % H;
      const int dv = ((k % W - l % W) % W + W) % W;
      T(k, l) = m_hat(du * W + dv) / static_cast<double>(n);
    }
  return T;
}

Eigen::VectorXcd stack(const MultiSpectrum& u) {
  Eigen::Index total = 0;
  for (const auto& ch : u) total += ch.size();
  Eigen::VectorXcd v(total);
  Eigen::Index at = 0;
  for (const auto& ch : u) {
    v.segment(at, ch.size()) = Eigen::Map<const Eigen::VectorXcd>(ch.data(), ch.size());
    at += ch.size();
  }
  return v;
}

MultiSpectrum unstack(const Eigen::VectorXcd& v, int depth, int rows, int cols) {
  const Eigen::Index n = static_cast<Eigen::Index>(rows) * cols;
  if (v.size() != depth * n) throw std::invalid_argument("unstack: length mismatch");
  MultiSpectrum out;
  for (int d = 0; d < depth; ++d) {
    Spectrum ch(rows, cols);
    Eigen::Map<Eigen::VectorXcd>(ch.data(), n) = v.segment(d * n, n);
    out.push_back(std::move(ch));
  }
  return out;
}

Eigen::MatrixXcd data_term(const SampleMemory& memory, const CropMask& mask) {
  const int D = memory.depth();
  const auto n = memory.rows() * memory.cols();
  const Eigen::MatrixXcd P = toeplitz(mask.p);
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(D * n, D * n);
  for (const auto& t : memory.samples()) {
    for (int d = 0; d < D; ++d) {
      const Eigen::VectorXcd xd = Eigen::Map<const Eigen::VectorXcd>(t.x_hat[d].data(), n);
      for (int j = 0; j < D; ++j) {
        const Eigen::VectorXcd xj = Eigen::Map<const Eigen::VectorXcd>(t.x_hat[j].data(), n);
        const Eigen::VectorXcd diag = xd.conjugate().cwiseProduct(xj);
        A.block(d * n, j * n, n, n) += t.weight * (P * diag.asDiagonal() * P);
      }
    }
  }
  return A;
}

Eigen::MatrixXcd constraint_term(const ConstraintPairSet& pairs, const std::vector<double>& gamma,
                                 int depth) {
  const int n = pairs.rows * pairs.cols;
  const Eigen::MatrixXcd F = dft_matrix(pairs.rows, pairs.cols);
  const Eigen::MatrixXcd Finv = F.adjoint() / static_cast<double>(n);
  const Eigen::MatrixXd V = pair_matrix(pairs);
  const Eigen::MatrixXcd block = F * (V.transpose() * V).cast<cd>() * Finv;
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(depth * n, depth * n);
  for (int d = 0; d < depth; ++d) A.block(d * n, d * n, n, n) = gamma.at(d) * block;
  return A;
}

Eigen::MatrixXcd reg_term(const SpatialRegularizer& regularizer, double lambda, int depth) {
  const auto n = regularizer.g.size();
  const Eigen::MatrixXcd block = lambda * toeplitz(regularizer.g.square());
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(depth * n, depth * n);
  for (int d = 0; d < depth; ++d) A.block(d * n, d * n, n, n) = block;
  return A;
}

Eigen::MatrixXd convolution_matrix(const RealGrid& x) {
  const int H = static_cast<int>(x.rows()), W = static_cast<int>(x.cols());
  const int n = H * W;
  Eigen::MatrixXd C(n, n);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      const int du = ((k / W - l / W) % H + H) % H;
      const int dv = ((k % W - l % W) % W + W) % W;
      C(k, l) = x(du, dv);
    }
  return C;
}

Eigen::MatrixXd pair_matrix(const ConstraintPairSet& pairs) {
  Eigen::MatrixXd V = Eigen::MatrixXd::Zero(pairs.size(), pairs.rows * pairs.cols);
  for (int k = 0; k < pairs.size(); ++k) {
    V(k, pairs.pairs[k].first) += 1.0;
    V(k, pairs.pairs[k].second) -= 1.0;
  }
  return V;
}

MultiGrid constrained_least_squares(const std::vector<MultiGrid>& samples,
                                    const std::vector<double>& weights, const CropMask& mask,
                                    const SpatialRegularizer& regularizer,
                                    const ConstraintPairSet& pairs, const RealGrid& label,
                                    double lambda) {
  if (samples.empty() || samples.size() != weights.size())
    throw std::invalid_argument("constrained_least_squares: one weight per sample required");
  const int D = static_cast<int>(samples.front().size());
  const int H = static_cast<int>(label.rows()), W = static_cast<int>(label.cols());
  const int n = H * W;

  const Eigen::VectorXd p = flatten(mask.p);
  const Eigen::VectorXd g = flatten(regularizer.g);
  const Eigen::VectorXd y = flatten(label);

  Eigen::MatrixXd Hm = Eigen::MatrixXd::Zero(D * n, D * n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(D * n);
  for (size_t t = 0; t < samples.size(); ++t) {
    Eigen::MatrixXd M(n, D * n);
    for (int d = 0; d < D; ++d) M.middleCols(d * n, n) = convolution_matrix(samples[t][d]) * p.asDiagonal();
    Hm += weights[t] * M.transpose() * M;
    b += weights[t] * M.transpose() * y;
  }
  for (int d = 0; d < D; ++d) Hm.block(d * n, d * n, n, n).diagonal() += lambda * g.cwiseAbs2();

  // Eliminate the constraints through a basis of their null space; pairs
  // inside one kernel are redundant, so the KKT matrix itself is singular.
  Eigen::MatrixXd Z;
  if (pairs.empty()) {
    Z = Eigen::MatrixXd::Identity(D * n, D * n);
  } else {
    const Eigen::MatrixXd V = pair_matrix(pairs);
    Eigen::MatrixXd E = Eigen::MatrixXd::Zero(D * V.rows(), D * n);
    for (int d = 0; d < D; ++d) E.block(d * V.rows(), d * n, V.rows(), n) = V;
    Z = Eigen::FullPivLU<Eigen::MatrixXd>(E).kernel();
  }
  const Eigen::VectorXd w = Z * (Z.transpose() * Hm * Z).ldlt().solve(Z.transpose() * b);

  MultiGrid out;
  for (int d = 0; d < D; ++d) {
    RealGrid ch(H, W);
    Eigen::Map<Eigen::VectorXd>(ch.data(), n) = w.segment(d * n, n);
    out.push_back(std::move(ch));
  }
  return out;
}

}  // namespace rpcf::dense
