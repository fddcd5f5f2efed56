#pragma once

#include "mcgpp/covariance.hpp"
#include "mcgpp/dataset.hpp"

namespace mcgpp {

/// log Poisson(z; E exp(eta)) with log z! from lgamma. Returns -inf when mu overflows.
double poisson_logpmf(double z, double eta, double log_exposure = 0.0);

/// Sum of per-observation Poisson log probabilities given the latent field.
double log_likelihood(const Vector& tau, const Dataset& data, const RegressionCoefficients& beta);

/// Log joint density Phi(tau) = log N(tau; 0, K) + log p(z | tau, beta), with K
/// entering only through its Cholesky factor.
double phi(const Vector& tau, const Dataset& data, const RegressionCoefficients& beta,
           const CholeskyFactor& K_factor);

struct PhiDerivatives {
  Vector gradient;  ///< (z - mu) - K^{-1} tau
  Vector W;         ///< diag of the negative likelihood Hessian, equal to mu
};

PhiDerivatives phi_grad_W(const Vector& tau, const Dataset& data,
                          const RegressionCoefficients& beta, const CholeskyFactor& K_factor);

}  // namespace mcgpp
