#include "mcgpp/baselines.hpp"

#include <cmath>

#include "mcgpp/errors.hpp"
#include "mcgpp/inference.hpp"

namespace mcgpp {

void CDRHyperparams::validate() const {
  theta1.validate(CovFamily::SquaredExponential);
  if (!std::isfinite(alpha)) throw InvalidParameter("CDR: alpha must be finite");
  if (!(sigma_eps2 > 0.0) || !std::isfinite(sigma_eps2)) {
    throw InvalidParameter("CDR: residual variance must be positive");
  }
}

void IndepHyperparams::validate() const {
  k1.validate(CovFamily::SquaredExponential);
  k2.validate(CovFamily::SquaredExponential);
  if (k1.dim() != k2.dim()) throw DimensionError("Indep: kernels have different dimensions");
}

CDRCovariance::CDRCovariance(const CDRHyperparams& params)
    : kernel_(PreparedKernel::self(CovFamily::SquaredExponential, params.theta1)),
      alpha_(params.alpha),
      sigma_eps2_(params.sigma_eps2) {
  params.validate();
}

Matrix CDRCovariance::block(int a, const Matrix& xa, int b, const Matrix& xb) const {
  const Matrix K1 = gram(kernel_, xa, xb);
  if (a == 0 && b == 0) return K1;
  if (a != b) return alpha_ * K1;
  Matrix K = alpha_ * alpha_ * K1;
  // The residual is white noise indexed by site: correlated only at identical inputs.
  for (Eigen::Index j = 0; j < xb.rows(); ++j) {
    for (Eigen::Index i = 0; i < xa.rows(); ++i) {
      if (xa.row(i) == xb.row(j)) K(i, j) += sigma_eps2_;
    }
  }
  return K;
}

IndepCovariance::IndepCovariance(const IndepHyperparams& params)
    : kernels_{PreparedKernel::self(CovFamily::SquaredExponential, params.k1),
               PreparedKernel::self(CovFamily::SquaredExponential, params.k2)} {
  params.validate();
}

Matrix IndepCovariance::block(int a, const Matrix& xa, int b, const Matrix& xb) const {
  if (a != b) return Matrix::Zero(xa.rows(), xb.rows());
  return gram(kernels_[a], xa, xb);
}

FittedModel fit_cdr(const Dataset& data, const OptimOptions& options) {
  return fit(data, ModelSpec::cdr(), options);
}

FittedModel fit_indep(const Dataset& data, const OptimOptions& options) {
  return fit(data, ModelSpec::indep(), options);
}

}  // namespace mcgpp
