#include "mcgpp/laplace.hpp"

#include <cmath>
#include <limits>

#include "mcgpp/errors.hpp"
#include "mcgpp/likelihood.hpp"

namespace mcgpp {

namespace {

struct NewtonSystem {
  Eigen::LLT<Matrix> llt;
  Vector sqrt_W;
};

NewtonSystem factor_B(const Matrix& K, const Vector& W) {
  NewtonSystem sys;
  sys.sqrt_W = W.cwiseMax(0.0).cwiseSqrt();
  Matrix B = sys.sqrt_W.asDiagonal() * K * sys.sqrt_W.asDiagonal();
  B.diagonal().array() += 1.0;
  sys.llt.compute(B);
  if (sys.llt.info() != Eigen::Success) {
    throw NumericalFailure("Laplace: I + W^1/2 K W^1/2 is not positive definite");
  }
  return sys;
}

double psi(const Vector& alpha, const Vector& tau, const SiteTerms& sites) {
  const double value = sites.log_lik(tau) - 0.5 * alpha.dot(tau);
  return std::isfinite(value) ? value : -std::numeric_limits<double>::infinity();
}

}  // namespace

SiteTerms SiteTerms::poisson(Vector offset, Vector counts) {
  if (offset.size() != counts.size()) throw DimensionError("SiteTerms: offset/count length mismatch");
  SiteTerms s;
  s.offset = std::move(offset);
  s.counts = std::move(counts);
  return s;
}

SiteTerms SiteTerms::with_linear(const Vector& offsets, const Vector& w) const {
  if (offsets.size() != w.size()) throw DimensionError("SiteTerms: linear offset/weight mismatch");
  SiteTerms s;
  s.offset.resize(offset.size() + offsets.size());
  s.offset << offset, offsets;
  s.counts = counts;
  s.weights.resize(weights.size() + w.size());
  s.weights << weights, w;
  return s;
}

double SiteTerms::log_lik(const Vector& tau) const {
  if (tau.size() != size()) throw DimensionError("SiteTerms: latent length mismatch");
  double total = 0.0;
  const Eigen::Index np = n_poisson();
  for (Eigen::Index i = 0; i < np; ++i) total += poisson_logpmf(counts[i], offset[i] + tau[i]);
  for (Eigen::Index i = np; i < size(); ++i) total += weights[i - np] * (offset[i] + tau[i]);
  return total;
}

void SiteTerms::derivatives(const Vector& tau, Vector& gradient, Vector& W) const {
  gradient.resize(size());
  W.resize(size());
  const Eigen::Index np = n_poisson();
  for (Eigen::Index i = 0; i < np; ++i) {
    const double mu = std::exp(offset[i] + tau[i]);
    gradient[i] = counts[i] - mu;
    W[i] = mu;
  }
  for (Eigen::Index i = np; i < size(); ++i) {
    gradient[i] = weights[i - np];
    W[i] = 0.0;
  }
}

LatentMode find_latent_mode(const Matrix& K, const SiteTerms& sites, const ModeOptions& options,
                            const Vector* warm_alpha) {
  const Eigen::Index n = sites.size();
  if (K.rows() != n || K.cols() != n) throw DimensionError("find_latent_mode: K size mismatch");
  if (!(options.tol > 0.0)) throw InvalidParameter("find_latent_mode: tolerance must be positive");

  LatentMode mode;
  mode.alpha = Vector::Zero(n);
  mode.tau = Vector::Zero(n);
  mode.objective = psi(mode.alpha, mode.tau, sites);
  if (warm_alpha && warm_alpha->size() == n) {
    const Vector tau = K * *warm_alpha;
    const double value = psi(*warm_alpha, tau, sites);
    if (value > mode.objective) {
      mode.alpha = *warm_alpha;
      mode.tau = tau;
      mode.objective = value;
    }
  }

  Vector grad, W;
  auto stationarity = [&] {
    sites.derivatives(mode.tau, grad, W);
    return (grad - mode.alpha).cwiseAbs().maxCoeff();
  };
  mode.grad_norm = n > 0 ? stationarity() : 0.0;

  // Convergence is judged by the Newton decrement (the objective gain the
  // full step predicts, in nats); the raw residual grad - alpha stalls at a
  // rounding floor when K is ill-conditioned. Once converged, one more Newton
  // step polishes the mode, which keeps numerical outer gradients smooth.
  while (mode.iterations < options.max_iter) {
    const NewtonSystem sys = factor_B(K, W);
    const Vector b = W.cwiseProduct(mode.tau) + grad;
    const Vector Kb = K * b;
    const Vector rhs = sys.sqrt_W.cwiseProduct(Kb);
    const Vector alpha_full = b - sys.sqrt_W.cwiseProduct(sys.llt.solve(rhs));
    const Vector step = alpha_full - mode.alpha;
    mode.decrement = std::abs(0.5 * (grad - mode.alpha).dot(K * step));
    if (mode.decrement < options.tol) {
      if (mode.converged) break;
      mode.converged = true;
    }

    double t = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 40; ++halving) {
      const Vector alpha = mode.alpha + t * step;
      const Vector tau = K * alpha;
      const double value = psi(alpha, tau, sites);
      if (value >= mode.objective) {
        mode.alpha = alpha;
        mode.tau = tau;
        mode.objective = value;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    ++mode.iterations;
    mode.grad_norm = stationarity();
    if (!accepted) break;
  }
  return mode;
}

LaplaceResult laplace_log_integral(const Matrix& K, const SiteTerms& sites,
                                   const ModeOptions& options, const Vector* warm_alpha) {
  LaplaceResult result;
  result.mode = find_latent_mode(K, sites, options, warm_alpha);
  if (!result.mode.converged) {
    throw ConvergenceError("Laplace: latent mode did not converge", result.mode.grad_norm);
  }
  Vector grad, W;
  sites.derivatives(result.mode.tau, grad, W);
  const NewtonSystem sys = factor_B(K, W);
  result.log_det_B = 2.0 * sys.llt.matrixLLT().diagonal().array().log().sum();
  result.log_integral = result.mode.objective - 0.5 * result.log_det_B;
  return result;
}

}  // namespace mcgpp
