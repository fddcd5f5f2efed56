#include "mcgpp/likelihood.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "mcgpp/errors.hpp"

namespace mcgpp {

double poisson_logpmf(double z, double eta, double log_exposure) {
  const double log_mu = eta + log_exposure;
  const double mu = std::exp(log_mu);
  if (!std::isfinite(mu)) return -std::numeric_limits<double>::infinity();
  const double zlog = z == 0.0 ? 0.0 : z * log_mu;
  return zlog - mu - std::lgamma(z + 1.0);
}

double log_likelihood(const Vector& tau, const Dataset& data, const RegressionCoefficients& beta) {
  if (tau.size() != data.total()) throw DimensionError("latent vector length differs from data");
  const Vector eta = linear_predictor(data, beta);
  const Vector z = data.stacked_counts();
  double total = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) total += poisson_logpmf(z[i], eta[i] + tau[i]);
  return total;
}

double phi(const Vector& tau, const Dataset& data, const RegressionCoefficients& beta,
           const CholeskyFactor& K_factor) {
  if (K_factor.L.rows() != tau.size()) throw DimensionError("phi: factor size differs from tau");
  const double n = static_cast<double>(tau.size());
  const Vector white = K_factor.L.triangularView<Eigen::Lower>().solve(tau);
  return -0.5 * K_factor.log_det() - 0.5 * white.squaredNorm() -
         0.5 * n * std::log(2.0 * std::numbers::pi) + log_likelihood(tau, data, beta);
}

PhiDerivatives phi_grad_W(const Vector& tau, const Dataset& data,
                          const RegressionCoefficients& beta, const CholeskyFactor& K_factor) {
  if (K_factor.L.rows() != tau.size() || tau.size() != data.total()) {
    throw DimensionError("phi_grad_W: dimension mismatch");
  }
  const Vector mu = (linear_predictor(data, beta) + tau).array().exp().matrix();
  PhiDerivatives out;
  out.gradient = data.stacked_counts() - mu - K_factor.solve(tau);
  out.W = mu;
  return out;
}

}  // namespace mcgpp
