#include "mcgpp/glm.hpp"

#include <cmath>

#include "mcgpp/errors.hpp"

namespace mcgpp {

GlmFit fit_poisson_glm(const Matrix& U, const Vector& z, const Vector& offset, int max_iter,
                       double tol) {
  if (U.rows() != z.size() || offset.size() != z.size()) {
    throw DimensionError("fit_poisson_glm: design, counts and offset lengths differ");
  }
  const Eigen::Index q = U.cols();
  GlmFit fit;
  fit.beta = Vector::Zero(q);

  // Start from the log of the mean rate on the intercept-like direction.
  const double mean_rate = (z.sum() + 0.5) / offset.array().exp().sum();
  Vector eta = Vector::Constant(z.size(), std::log(mean_rate)) + offset;
  for (fit.iterations = 0; fit.iterations < max_iter; ++fit.iterations) {
    const Vector mu = eta.array().exp().matrix();
    // Working response for the linear predictor minus offset.
    const Vector work = (eta - offset) + (z - mu).cwiseQuotient(mu);
    const Matrix UtW = U.transpose() * mu.asDiagonal();
    Matrix normal = UtW * U;
    const Vector rhs = UtW * work;
    Eigen::LDLT<Matrix> ldlt(normal);
    if (ldlt.info() != Eigen::Success || ldlt.rcond() < 1e-13) {
      normal.diagonal().array() += 1e-8 * std::max(1.0, normal.diagonal().maxCoeff());
      ldlt.compute(normal);
    }
    const Vector beta = ldlt.solve(rhs);
    if (!beta.allFinite()) throw NumericalFailure("fit_poisson_glm: IRLS diverged");
    const double change = (beta - fit.beta).cwiseAbs().maxCoeff();
    fit.beta = beta;
    eta = U * fit.beta + offset;
    if (change < tol * (1.0 + fit.beta.cwiseAbs().maxCoeff())) {
      fit.converged = true;
      ++fit.iterations;
      break;
    }
  }
  return fit;
}

}  // namespace mcgpp
