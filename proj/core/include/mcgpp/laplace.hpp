#pragma once

#include "mcgpp/kernels.hpp"

namespace mcgpp {

/// Site terms of a latent Gaussian model.
///
/// The first `n_poisson` sites carry Poisson(exp(offset_i + tau_i)) counts.
/// Any remaining site contributes the linear exponent weight_i (offset_i + tau_i),
/// which is how predictive moments E[exp(w'(eta* + tau*))] enter the integrand.
struct SiteTerms {
  Vector offset;
  Vector counts;
  Vector weights;

  static SiteTerms poisson(Vector offset, Vector counts);
  /// Appends linear-exponent sites after the Poisson ones.
  SiteTerms with_linear(const Vector& offsets, const Vector& weights) const;

  Eigen::Index size() const { return offset.size(); }
  Eigen::Index n_poisson() const { return counts.size(); }

  double log_lik(const Vector& tau) const;
  /// Gradient of log_lik and the diagonal of its negative Hessian.
  void derivatives(const Vector& tau, Vector& gradient, Vector& W) const;
};

struct ModeOptions {
  double tol = 1e-8;  ///< Newton-decrement threshold in nats
  int max_iter = 100;
};

/// Maximizer of Psi(tau) = log_lik(tau) - tau' K^{-1} tau / 2.
///
/// `alpha` satisfies tau = K alpha; at the mode alpha = grad log_lik(tau).
struct LatentMode {
  Vector tau;
  Vector alpha;
  double objective = 0.0;  ///< Psi at the mode
  double grad_norm = 0.0;  ///< ||grad log_lik(tau) - alpha||_inf
  double decrement = 0.0;  ///< last Newton decrement (predicted gain in nats)
  int iterations = 0;
  bool converged = false;
};

/// Damped Newton on the concave Psi; K^{-1} is never formed. Each accepted step
/// does not decrease Psi. `warm_alpha` is used only when it scores better than zero.
LatentMode find_latent_mode(const Matrix& K, const SiteTerms& sites, const ModeOptions& options,
                            const Vector* warm_alpha = nullptr);

struct LaplaceResult {
  double log_integral = 0.0;  ///< approximation of log of the integral of exp(Phi)
  double log_det_B = 0.0;     ///< log|I + W^{1/2} K W^{1/2}| at the mode
  LatentMode mode;
};

/// Laplace approximation of log of the integral of N(tau; 0, K) * exp(log_lik(tau)),
/// evaluated as Psi(tau0) - log|B| / 2. Throws ConvergenceError if the mode is not found.
LaplaceResult laplace_log_integral(const Matrix& K, const SiteTerms& sites,
                                   const ModeOptions& options = {},
                                   const Vector* warm_alpha = nullptr);

}  // namespace mcgpp
