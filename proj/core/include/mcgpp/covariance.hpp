#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "mcgpp/kernels.hpp"

namespace mcgpp {

/// One latent CGP: its smoothing-kernel family and parameters.
struct ProcessKernel {
  CovFamily family = CovFamily::SquaredExponential;
  KernelParams params;
};

/// Hyperparameters of the bivariate MCGP tau_a = xi_a + eta_a.
///
/// xi_1 and xi_2 convolve the same white noise and therefore share one family
/// (and one shape parameter, read from xi1). eta_1 and eta_2 are independent.
struct MCGPHyperparams {
  CovFamily shared_family = CovFamily::SquaredExponential;
  KernelParams xi1;
  KernelParams xi2;
  ProcessKernel eta1;
  ProcessKernel eta2;

  Eigen::Index dim() const { return xi1.dim(); }
  void validate() const;
};

/// Covariance inputs of both components, one point per row.
struct StackedInputs {
  Matrix x1;
  Matrix x2;

  Eigen::Index n1() const { return x1.rows(); }
  Eigen::Index n2() const { return x2.rows(); }
  Eigen::Index size() const { return x1.rows() + x2.rows(); }
  Eigen::Index dim() const { return x1.cols(); }
  void validate() const;
};

/// Gram matrix G(i, j) = k(xa_i - xb_j).
Matrix gram(const PreparedKernel& kernel, const Matrix& xa, const Matrix& xb);

/// A zero-mean bivariate latent Gaussian field.
///
/// `block(a, xa, b, xb)` is Cov(tau_a(xa_i), tau_b(xb_j)) for components
/// a, b in {0, 1}. Stacked matrices follow the order (component 1 points,
/// component 2 points, tau_1*, tau_2*).
class BivariateCovariance {
 public:
  virtual ~BivariateCovariance() = default;
  virtual Matrix block(int a, const Matrix& xa, int b, const Matrix& xb) const = 0;
  virtual Eigen::Index dim() const = 0;

  Matrix stacked(const StackedInputs& inputs) const;
  Matrix stacked_plus(const StackedInputs& inputs, const Vector& x1_star,
                      const Vector& x2_star) const;
};

class MCGPCovariance final : public BivariateCovariance {
 public:
  explicit MCGPCovariance(const MCGPHyperparams& theta);
  Matrix block(int a, const Matrix& xa, int b, const Matrix& xb) const override;
  Eigen::Index dim() const override { return dim_; }

 private:
  Eigen::Index dim_;
  PreparedKernel xi_self_[2];
  PreparedKernel eta_self_[2];
  PreparedKernel xi_cross_;
};

Matrix assemble_K(const StackedInputs& inputs, const MCGPHyperparams& theta);
Matrix assemble_K_plus(const StackedInputs& inputs, const Vector& x1_star, const Vector& x2_star,
                       const MCGPHyperparams& theta);

/// Lower Cholesky factor of K + jitter * I.
struct CholeskyFactor {
  Matrix L;
  double jitter = 0.0;

  double log_det() const;
  /// K^{-1} b through two triangular solves.
  Vector solve(const Vector& b) const;
};

/// Relative jitter levels {0, 1e-10, 1e-8, 1e-6}; multiplied by the mean diagonal.
std::span<const double> default_jitter_schedule();

/// Factor K + j I for the first j of the (relative) schedule that succeeds.
/// Throws SingularCovariance carrying the last absolute jitter tried.
CholeskyFactor chol_psd(const Matrix& K,
                        std::span<const double> relative_schedule = default_jitter_schedule());

/// Exact draw tau = L eps, eps ~ N(0, I), from N(0, K + jI).
Vector sample_gaussian(const Matrix& K, std::uint64_t seed);

/// (tau_1, tau_2) drawn from the MCGP prior at the stacked inputs.
std::pair<Vector, Vector> sample_mcgp(const StackedInputs& inputs, const MCGPHyperparams& theta,
                                      std::uint64_t seed);

}  // namespace mcgpp
