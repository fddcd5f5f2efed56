#include "mcgpp/kernels.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mcgpp/errors.hpp"

namespace mcgpp {

namespace {

constexpr double kPi = std::numbers::pi;

void check_precision(const Matrix& A, const char* what) {
  if (A.rows() != A.cols() || A.rows() == 0) {
    throw DimensionError(std::string(what) + ": precision matrix must be square and non-empty");
  }
  const double scale = std::max(A.cwiseAbs().maxCoeff(), 1e-300);
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InvalidParameter(std::string(what) + ": precision matrix is not symmetric");
  }
  if (!A.allFinite()) {
    throw InvalidParameter(std::string(what) + ": precision matrix has non-finite entries");
  }
}

bool is_diagonal(const Matrix& M) {
  for (Eigen::Index j = 0; j < M.cols(); ++j) {
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
      if (i != j && M(i, j) != 0.0) return false;
    }
  }
  return true;
}

// log|M| for symmetric positive-definite M.
double log_det_spd(const Matrix& M, const char* what) {
  Eigen::LLT<Matrix> llt(M);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite(std::string(what) + ": matrix is not positive definite");
  }
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

double matern(double m, double nu) {
  if (m <= 0.0) return 1.0;
  const double t = std::sqrt(2.0 * nu) * m;
  if (nu == 0.5) return std::exp(-t);
  if (nu == 1.5) return (1.0 + t) * std::exp(-t);
  if (nu == 2.5) return (1.0 + t + t * t / 3.0) * std::exp(-t);
  if (t > 700.0) return 0.0;
  const double log_value =
      (1.0 - nu) * std::log(2.0) - std::lgamma(nu) + nu * std::log(t);
  return std::exp(log_value) * std::cyl_bessel_k(nu, t);
}

void check_shape(CovFamily family, double shape) {
  switch (family) {
    case CovFamily::SquaredExponential:
      return;
    case CovFamily::Matern:
      if (!(shape > 0.0) || !std::isfinite(shape)) {
        throw InvalidParameter("Matern smoothness must be positive");
      }
      return;
    case CovFamily::GammaExponential:
      if (!(shape > 0.0 && shape <= 2.0)) {
        throw InvalidParameter("gamma-exponential exponent must lie in (0, 2]");
      }
      return;
    case CovFamily::RationalQuadratic:
      if (!(shape > 0.0) || !std::isfinite(shape)) {
        throw InvalidParameter("rational-quadratic shape must be positive");
      }
      return;
  }
}

double required_shape(CovFamily family, const KernelParams& params) {
  if (!has_shape(family)) return 0.0;
  if (!params.shape) {
    throw InvalidParameter("missing shape parameter for " + std::string(to_string(family)));
  }
  check_shape(family, *params.shape);
  return *params.shape;
}

// Lexicographic order on (v, A) so a pair of kernels has one canonical orientation.
bool precedes(const KernelParams& a, const KernelParams& b) {
  if (a.v != b.v) return a.v < b.v;
  for (Eigen::Index i = 0; i < a.A.size(); ++i) {
    if (a.A.data()[i] != b.A.data()[i]) return a.A.data()[i] < b.A.data()[i];
  }
  return false;
}

}  // namespace

std::string_view to_string(CovFamily family) {
  switch (family) {
    case CovFamily::SquaredExponential:
      return "sqexp";
    case CovFamily::Matern:
      return "matern";
    case CovFamily::GammaExponential:
      return "gammaexp";
    case CovFamily::RationalQuadratic:
      return "ratquad";
  }
  return "unknown";
}

CovFamily family_from_string(std::string_view name) {
  if (name == "sqexp") return CovFamily::SquaredExponential;
  if (name == "matern") return CovFamily::Matern;
  if (name == "gammaexp") return CovFamily::GammaExponential;
  if (name == "ratquad") return CovFamily::RationalQuadratic;
  throw InvalidParameter("unknown covariance family '" + std::string(name) + "'");
}

bool has_shape(CovFamily family) { return family != CovFamily::SquaredExponential; }

double default_shape(CovFamily family) {
  switch (family) {
    case CovFamily::Matern:
      return 1.5;
    case CovFamily::GammaExponential:
      return 1.5;
    case CovFamily::RationalQuadratic:
      return 1.0;
    case CovFamily::SquaredExponential:
      break;
  }
  return 0.0;
}

KernelParams KernelParams::isotropic(double v, double a, Eigen::Index p, CovFamily family) {
  KernelParams params;
  params.v = v;
  params.A = a * Matrix::Identity(p, p);
  if (has_shape(family)) params.shape = default_shape(family);
  return params;
}

void KernelParams::validate(CovFamily family) const {
  if (!std::isfinite(v)) throw InvalidParameter("kernel amplitude must be finite");
  check_precision(A, "KernelParams");
  Eigen::LLT<Matrix> llt(A);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("KernelParams: precision matrix is not positive definite");
  }
  required_shape(family, *this);
}

double quad_form(const Vector& d, const Matrix& Aa, const Matrix& Ab) {
  if (Aa.rows() != d.size() || Ab.rows() != d.size() || Aa.cols() != d.size() ||
      Ab.cols() != d.size()) {
    throw DimensionError("quad_form: displacement and precision dimensions differ");
  }
  Eigen::LLT<Matrix> llt(Aa + Ab);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("quad_form: A_a + A_b is not positive definite");
  }
  const Vector x = llt.solve(Ab * d);
  return std::max(0.0, (Aa * d).dot(x));
}

double cov_self_sqexp(const Vector& d, const KernelParams& params) {
  if (d.size() != params.dim()) throw DimensionError("cov_self_sqexp: dimension mismatch");
  const double p = static_cast<double>(d.size());
  const double log_det = log_det_spd(params.A, "cov_self_sqexp");
  return std::pow(kPi, p / 2.0) * params.v * params.v * std::exp(-0.5 * log_det) *
         std::exp(-0.25 * d.dot(params.A * d));
}

double cov_cross_sqexp(const Vector& d, const KernelParams& pa, const KernelParams& pb) {
  return cov_cross(CovFamily::SquaredExponential, d, pa, pb);
}

double correlation(CovFamily family, double m, double shape) {
  switch (family) {
    case CovFamily::SquaredExponential:
      return std::exp(-0.5 * m * m);
    case CovFamily::Matern:
      return matern(m, shape);
    case CovFamily::GammaExponential:
      return std::exp(-0.5 * std::pow(m, shape));
    case CovFamily::RationalQuadratic:
      return std::pow(1.0 + m * m / (2.0 * shape), -shape);
  }
  return 0.0;
}

double cov_iso(CovFamily family, const Vector& d, const KernelParams& params) {
  if (d.size() != params.dim()) throw DimensionError("cov_iso: dimension mismatch");
  return PreparedKernel::self(family, params)(d);
}

double cov_cross_general(const IsotropicCorrelation& S, const Vector& d, const KernelParams& pa,
                         const KernelParams& pb) {
  if (pa.dim() != pb.dim()) throw DimensionError("cov_cross_general: kernel dimensions differ");
  const double p = static_cast<double>(d.size());
  const double log_det = log_det_spd(pa.A + pb.A, "cov_cross_general");
  const double q = quad_form(d, pa.A, pb.A);
  return pa.v * pb.v * std::pow(2.0 * kPi, p / 2.0) * std::exp(-0.5 * log_det) * S(std::sqrt(q));
}

double cov_cross(CovFamily family, const Vector& d, const KernelParams& pa, const KernelParams& pb) {
  if (d.size() != pa.dim() || d.size() != pb.dim()) {
    throw DimensionError("cov_cross: dimension mismatch");
  }
  return PreparedKernel::cross(family, pa, pb)(d);
}

PreparedKernel::PreparedKernel(CovFamily family, double scale, Matrix metric, double shape)
    : family_(family),
      scale_(scale),
      metric_(std::move(metric)),
      shape_(shape),
      diagonal_(is_diagonal(metric_)) {}

PreparedKernel PreparedKernel::self(CovFamily family, const KernelParams& params) {
  check_precision(params.A, "PreparedKernel::self");
  const double shape = required_shape(family, params);
  const double p = static_cast<double>(params.dim());
  const double log_det = log_det_spd(params.A, "PreparedKernel::self");
  const double scale =
      std::pow(kPi, p / 2.0) * params.v * params.v * std::exp(-0.5 * log_det);
  return PreparedKernel(family, scale, 0.5 * params.A, shape);
}

PreparedKernel PreparedKernel::cross(CovFamily family, const KernelParams& pa,
                                     const KernelParams& pb) {
  if (pa.dim() != pb.dim()) throw DimensionError("PreparedKernel::cross: dimension mismatch");
  check_precision(pa.A, "PreparedKernel::cross");
  check_precision(pb.A, "PreparedKernel::cross");
  const double shape = required_shape(family, pa);
  const KernelParams& first = precedes(pb, pa) ? pb : pa;
  const KernelParams& second = precedes(pb, pa) ? pa : pb;

  const Matrix sum = first.A + second.A;
  Eigen::LLT<Matrix> llt(sum);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("PreparedKernel::cross: A_a + A_b is not positive definite");
  }
  Matrix metric = first.A * llt.solve(second.A);
  metric = 0.5 * (metric + metric.transpose()).eval();
  const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  const double p = static_cast<double>(pa.dim());
  const double scale =
      first.v * second.v * std::pow(2.0 * kPi, p / 2.0) * std::exp(-0.5 * log_det);
  return PreparedKernel(family, scale, std::move(metric), shape);
}

double PreparedKernel::operator()(const Eigen::Ref<const Vector>& d) const {
  double q;
  if (diagonal_) {
    q = 0.0;
    for (Eigen::Index i = 0; i < d.size(); ++i) q += metric_(i, i) * d[i] * d[i];
  } else {
    q = std::max(0.0, d.dot(metric_ * d));
  }
  if (scale_ == 0.0) return 0.0;
  if (family_ == CovFamily::SquaredExponential) return scale_ * std::exp(-0.5 * q);
  return scale_ * correlation(family_, std::sqrt(q), shape_);
}

}  // namespace mcgpp
