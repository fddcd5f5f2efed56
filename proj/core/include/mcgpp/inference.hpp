#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mcgpp/dataset.hpp"
#include "mcgpp/laplace.hpp"
#include "mcgpp/model.hpp"

namespace mcgpp {

struct OptimOptions {
  int max_iter = 200;         ///< outer quasi-Newton iterations per start
  double grad_step = 1e-4;    ///< central-difference step in transformed space
  double grad_tol = 1e-4;     ///< outer gradient-norm tolerance
  double mode_tol = 1e-8;     ///< latent-mode Newton-decrement tolerance (nats)
  double outer_tol = 1e-6;    ///< relative objective change for stalled steps
  int mode_max_iter = 100;
  int n_starts = 3;
  std::uint64_t seed = 0;

  ModeOptions mode() const { return {mode_tol, mode_max_iter}; }
};

struct StartDiagnostics {
  int start = 0;
  double loglik = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string message;
};

struct FittedModel {
  ModelSpec spec;
  RegressionCoefficients beta;
  Hyperparams theta;
  Vector params;          ///< optimum in the unconstrained parameterization
  Vector tau0;            ///< latent mode at the optimum
  CholeskyFactor K_factor;
  double loglik = 0.0;    ///< Laplace marginal log-likelihood at the optimum
  int n_params = 0;
  bool converged = false;
  int iterations = 0;
  ModeOptions mode_options;
  std::vector<StartDiagnostics> starts;
};

/// Mode of Phi(tau) for fixed beta and covariance K.
LatentMode find_mode(const Dataset& data, const RegressionCoefficients& beta, const Matrix& K,
                     double tol = 1e-8, int max_iter = 100);

/// Laplace approximation of the marginal log-likelihood log p(z | beta, theta).
double laplace_marginal_loglik(const RegressionCoefficients& beta, const Hyperparams& theta,
                               const Dataset& data, const ModeOptions& options = {});

/// Warm start: Poisson GLM for beta, amplitudes from the working-residual
/// variance, length scales from the median pairwise input distance.
Vector initial_parameters(const Dataset& data, const ParameterMap& map);

/// Empirical-Bayes fit of (beta, theta) by multistart quasi-Newton ascent of
/// the Laplace marginal likelihood. Throws FitError if every start fails.
FittedModel fit(const Dataset& data, const ModelSpec& spec, const OptimOptions& options);

/// Rebuilds the derived fields of a model (tau0, K factor, loglik) from its parameters.
FittedModel refresh_model(const Dataset& data, const ModelSpec& spec, const Vector& params,
                          const ModeOptions& mode_options);

double aic(double loglik, int n_params);
double aic(const FittedModel& model);

/// Standard errors of beta from the numerical Hessian of the Laplace
/// log-likelihood in beta at the fitted hyperparameters.
Vector beta_standard_errors(const FittedModel& model, const Dataset& data);

}  // namespace mcgpp
