#include "mcgpp/covariance.hpp"

#include <array>
#include <random>

#include "mcgpp/errors.hpp"

namespace mcgpp {

namespace {

constexpr std::array<double, 4> kJitterSchedule{0.0, 1e-10, 1e-8, 1e-6};

}  // namespace

void MCGPHyperparams::validate() const {
  xi1.validate(shared_family);
  KernelParams xi2_shape = xi2;
  xi2_shape.shape = xi1.shape;
  xi2_shape.validate(shared_family);
  eta1.params.validate(eta1.family);
  eta2.params.validate(eta2.family);
  const auto p = xi1.dim();
  if (xi2.dim() != p || eta1.params.dim() != p || eta2.params.dim() != p) {
    throw DimensionError("MCGPHyperparams: kernels have different input dimensions");
  }
}

void StackedInputs::validate() const {
  if (x1.rows() < 1 || x2.rows() < 1) {
    throw DimensionError("StackedInputs: each component needs at least one point");
  }
  if (x1.cols() != x2.cols() || x1.cols() < 1) {
    throw DimensionError("StackedInputs: components have different input dimensions");
  }
}

Matrix gram(const PreparedKernel& kernel, const Matrix& xa, const Matrix& xb) {
  if (xa.cols() != kernel.dim() || xb.cols() != kernel.dim()) {
    throw DimensionError("gram: input dimension does not match kernel");
  }
  Matrix G(xa.rows(), xb.rows());
  Vector d(xa.cols());
  for (Eigen::Index j = 0; j < xb.rows(); ++j) {
    for (Eigen::Index i = 0; i < xa.rows(); ++i) {
      d = xa.row(i).transpose() - xb.row(j).transpose();
      G(i, j) = kernel(d);
    }
  }
  return G;
}

Matrix BivariateCovariance::stacked(const StackedInputs& inputs) const {
  inputs.validate();
  const auto n1 = inputs.n1();
  const auto n2 = inputs.n2();
  Matrix K(n1 + n2, n1 + n2);
  K.topLeftCorner(n1, n1) = block(0, inputs.x1, 0, inputs.x1);
  K.bottomRightCorner(n2, n2) = block(1, inputs.x2, 1, inputs.x2);
  K.topRightCorner(n1, n2) = block(0, inputs.x1, 1, inputs.x2);
  K.bottomLeftCorner(n2, n1) = K.topRightCorner(n1, n2).transpose();
  return K;
}

Matrix BivariateCovariance::stacked_plus(const StackedInputs& inputs, const Vector& x1_star,
                                         const Vector& x2_star) const {
  inputs.validate();
  if (x1_star.size() != inputs.dim() || x2_star.size() != inputs.dim()) {
    throw DimensionError("stacked_plus: new point dimension does not match inputs");
  }
  const auto n1 = inputs.n1();
  const auto n2 = inputs.n2();
  const auto n = n1 + n2;
  const Matrix s1 = x1_star.transpose();
  const Matrix s2 = x2_star.transpose();

  Matrix K(n + 2, n + 2);
  K.topLeftCorner(n, n) = stacked(inputs);
  // Columns for tau_1* and tau_2*.
  K.block(0, n, n1, 1) = block(0, inputs.x1, 0, s1);
  K.block(n1, n, n2, 1) = block(1, inputs.x2, 0, s1);
  K.block(0, n + 1, n1, 1) = block(0, inputs.x1, 1, s2);
  K.block(n1, n + 1, n2, 1) = block(1, inputs.x2, 1, s2);
  K(n, n) = block(0, s1, 0, s1)(0, 0);
  K(n + 1, n + 1) = block(1, s2, 1, s2)(0, 0);
  K(n, n + 1) = block(0, s1, 1, s2)(0, 0);
  K(n + 1, n) = K(n, n + 1);
  K.block(n, 0, 2, n) = K.block(0, n, n, 2).transpose();
  return K;
}

MCGPCovariance::MCGPCovariance(const MCGPHyperparams& theta)
    : dim_(theta.dim()),
      xi_self_{PreparedKernel::self(theta.shared_family, theta.xi1),
               PreparedKernel::self(theta.shared_family,
                                    [&] {
                                      KernelParams p = theta.xi2;
                                      p.shape = theta.xi1.shape;
                                      return p;
                                    }())},
      eta_self_{PreparedKernel::self(theta.eta1.family, theta.eta1.params),
                PreparedKernel::self(theta.eta2.family, theta.eta2.params)},
      xi_cross_(PreparedKernel::cross(theta.shared_family, theta.xi1, theta.xi2)) {
  theta.validate();
}

Matrix MCGPCovariance::block(int a, const Matrix& xa, int b, const Matrix& xb) const {
  if (a == b) {
    return gram(xi_self_[a], xa, xb) + gram(eta_self_[a], xa, xb);
  }
  // Cov(tau_1(x), tau_2(x')) = k_12(x - x'); Cov(tau_2(x), tau_1(x')) = k_12(x' - x).
  if (a == 0) return gram(xi_cross_, xa, xb);
  return gram(xi_cross_, xb, xa).transpose();
}

Matrix assemble_K(const StackedInputs& inputs, const MCGPHyperparams& theta) {
  return MCGPCovariance(theta).stacked(inputs);
}

Matrix assemble_K_plus(const StackedInputs& inputs, const Vector& x1_star, const Vector& x2_star,
                       const MCGPHyperparams& theta) {
  return MCGPCovariance(theta).stacked_plus(inputs, x1_star, x2_star);
}

double CholeskyFactor::log_det() const { return 2.0 * L.diagonal().array().log().sum(); }

Vector CholeskyFactor::solve(const Vector& b) const {
  const Vector y = L.triangularView<Eigen::Lower>().solve(b);
  return L.transpose().triangularView<Eigen::Upper>().solve(y);
}

std::span<const double> default_jitter_schedule() { return kJitterSchedule; }

CholeskyFactor chol_psd(const Matrix& K, std::span<const double> relative_schedule) {
  if (K.rows() != K.cols()) throw DimensionError("chol_psd: matrix is not square");
  if (relative_schedule.empty()) throw InvalidParameter("chol_psd: empty jitter schedule");
  const double mean_diag = K.rows() > 0 ? K.diagonal().mean() : 1.0;
  const double scale = mean_diag > 0.0 ? mean_diag : 1.0;
  double jitter = 0.0;
  for (const double level : relative_schedule) {
    jitter = level * scale;
    Matrix M = K;
    M.diagonal().array() += jitter;
    Eigen::LLT<Matrix> llt(M);
    if (llt.info() == Eigen::Success && llt.matrixLLT().diagonal().allFinite()) {
      return CholeskyFactor{llt.matrixL(), jitter};
    }
  }
  throw SingularCovariance("chol_psd: covariance is not positive definite at any jitter level",
                           jitter);
}

Vector sample_gaussian(const Matrix& K, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector eps(K.rows());
  for (Eigen::Index i = 0; i < eps.size(); ++i) eps[i] = normal(rng);
  if (K.size() == 0 || K.cwiseAbs().maxCoeff() == 0.0) return Vector::Zero(K.rows());
  const CholeskyFactor factor = chol_psd(K);
  return factor.L * eps;
}

std::pair<Vector, Vector> sample_mcgp(const StackedInputs& inputs, const MCGPHyperparams& theta,
                                      std::uint64_t seed) {
  const Vector tau = sample_gaussian(assemble_K(inputs, theta), seed);
  return {tau.head(inputs.n1()), tau.tail(inputs.n2())};
}

}  // namespace mcgpp
