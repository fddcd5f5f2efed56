#pragma once

#include "mcgpp/covariance.hpp"

namespace mcgpp {

struct Dataset;
struct FittedModel;
struct OptimOptions;

/// Conditional model: tau_1 ~ GP(0, k_1) with a squared-exponential k_1 and
/// tau_2 | tau_1 ~ N(alpha tau_1, sigma_eps2 I).
struct CDRHyperparams {
  KernelParams theta1;
  double alpha = 0.0;
  double sigma_eps2 = 1.0;

  Eigen::Index dim() const { return theta1.dim(); }
  void validate() const;
};

/// Two independent squared-exponential GPs.
struct IndepHyperparams {
  KernelParams k1;
  KernelParams k2;

  Eigen::Index dim() const { return k1.dim(); }
  void validate() const;
};

/// Joint covariance of the conditional model as a bivariate field:
/// Cov(tau_1, tau_1) = K_1, Cov(tau_1, tau_2) = alpha K_1,
/// Cov(tau_2, tau_2) = alpha^2 K_1 + sigma_eps2 [x == x'].
class CDRCovariance final : public BivariateCovariance {
 public:
  explicit CDRCovariance(const CDRHyperparams& params);
  Matrix block(int a, const Matrix& xa, int b, const Matrix& xb) const override;
  Eigen::Index dim() const override { return kernel_.dim(); }

 private:
  PreparedKernel kernel_;
  double alpha_;
  double sigma_eps2_;
};

class IndepCovariance final : public BivariateCovariance {
 public:
  explicit IndepCovariance(const IndepHyperparams& params);
  Matrix block(int a, const Matrix& xa, int b, const Matrix& xb) const override;
  Eigen::Index dim() const override { return kernels_[0].dim(); }

 private:
  PreparedKernel kernels_[2];
};

/// Fits the conditional baseline by maximizing the same Laplace marginal
/// likelihood. Requires paired inputs; throws UnsupportedData otherwise.
FittedModel fit_cdr(const Dataset& data, const OptimOptions& options);

/// Fits two independent squared-exponential GP-Poisson components jointly.
FittedModel fit_indep(const Dataset& data, const OptimOptions& options);

}  // namespace mcgpp
