#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mcgpp/errors.hpp"
#include "mcgpp/likelihood.hpp"
#include "oracles.hpp"

using namespace mcgpp;

namespace {

Dataset tiny_dataset(const Vector& z1, const Vector& z2, std::mt19937_64* rng = nullptr) {
  auto comp = [&](const Vector& z) {
    Matrix U = Matrix::Ones(z.size(), 1);
    Matrix X(z.size(), 1);
    for (Eigen::Index i = 0; i < z.size(); ++i)
      X(i, 0) = rng ? std::uniform_real_distribution<double>(-2, 2)(*rng) : double(i);
    return Dataset::make_component(z, U, X);
  };
  Dataset d;
  d.comp[0] = comp(z1);
  d.comp[1] = comp(z2);
  return d;
}

RegressionCoefficients zero_beta() { return {Vector::Zero(1), Vector::Zero(1)}; }

}  // namespace

TEST(PoissonLogPmf, SmallCases) {
  EXPECT_DOUBLE_EQ(poisson_logpmf(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(poisson_logpmf(1, 0), -1.0);
  EXPECT_NEAR(poisson_logpmf(3, std::log(2.0)), -1.71231, 1e-5);
  EXPECT_NEAR(poisson_logpmf(3, std::log(2.0)), std::log(8.0 * std::exp(-2.0) / 6.0), 1e-14);
}

TEST(PoissonLogPmf, ExposureIsAnOffset) {
  EXPECT_DOUBLE_EQ(poisson_logpmf(4, 0.3, std::log(2.5)), poisson_logpmf(4, 0.3 + std::log(2.5)));
}

TEST(PoissonLogPmf, OverflowIsMinusInfinity) {
  EXPECT_EQ(poisson_logpmf(2, 1000.0), -std::numeric_limits<double>::infinity());
}

TEST(Phi, CanonicalTwoPointCase) {
  const Dataset d = tiny_dataset(Vector::Ones(1), Vector::Ones(1));
  const CholeskyFactor f = chol_psd(Matrix::Identity(2, 2));
  const double value = phi(Vector::Zero(2), d, zero_beta(), f);
  EXPECT_NEAR(value, -std::log(2.0 * std::numbers::pi) - 2.0, 1e-14);
  EXPECT_NEAR(value, -3.83788, 1e-5);
}

TEST(Phi, MatchesDirectDensity) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> N;
  const Dataset d = tiny_dataset(Eigen::Vector3d(0, 2, 5), Eigen::Vector2d(1, 7), &rng);
  Matrix M(5, 5);
  for (Eigen::Index i = 0; i < M.size(); ++i) M.data()[i] = N(rng);
  const Matrix K = M * M.transpose() + Matrix::Identity(5, 5);
  Vector tau(5);
  for (auto& t : tau) t = 0.3 * N(rng);
  oracle::LogTarget target{K, linear_predictor(d, zero_beta()), d.stacked_counts(), {}};
  EXPECT_NEAR(phi(tau, d, zero_beta(), chol_psd(K)), target(tau), 1e-11);
}

TEST(Phi, FlatPriorLimitIsPureLikelihood) {
  const Dataset d = tiny_dataset(Eigen::Vector2d(3, 1), Eigen::Vector2d(0, 4));
  const CholeskyFactor f = chol_psd(1e6 * Matrix::Identity(4, 4));
  const Vector a = Eigen::Vector4d(0.1, -0.2, 0.3, 0.5), b = Eigen::Vector4d(-0.4, 0.2, 0.0, 1.0);
  const double prior_gap = phi(a, d, zero_beta(), f) - phi(b, d, zero_beta(), f);
  const double lik_gap = log_likelihood(a, d, zero_beta()) - log_likelihood(b, d, zero_beta());
  EXPECT_NEAR(prior_gap, lik_gap, 1e-6);
}

TEST(PhiGradient, ZeroAtExactFit) {
  const Dataset d = tiny_dataset(Vector::Ones(2), Vector::Ones(2));
  const auto g = phi_grad_W(Vector::Zero(4), d, zero_beta(), chol_psd(Matrix::Identity(4, 4)));
  EXPECT_TRUE(g.gradient.isZero(0.0));
  EXPECT_EQ(g.W, Vector::Ones(4));
}

TEST(PhiGradient, MatchesFiniteDifferences) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> N;
  for (int trial = 0; trial < 20; ++trial) {
    const Dataset d = tiny_dataset(Eigen::Vector3d(1, 4, 0), Eigen::Vector3d(2, 2, 9), &rng);
    Matrix M(6, 6);
    for (Eigen::Index i = 0; i < M.size(); ++i) M.data()[i] = N(rng);
    const CholeskyFactor f = chol_psd(M * M.transpose() + 0.5 * Matrix::Identity(6, 6));
    Vector tau(6);
    for (auto& t : tau) t = 0.5 * N(rng);
    const RegressionCoefficients beta{Vector::Constant(1, 0.2), Vector::Constant(1, -0.1)};
    const auto g = phi_grad_W(tau, d, beta, f);
    const double h = 1e-5;
    for (Eigen::Index i = 0; i < 6; ++i) {
      Vector up = tau, dn = tau;
      up(i) += h;
      dn(i) -= h;
      const double fd = (phi(up, d, beta, f) - phi(dn, d, beta, f)) / (2 * h);
      EXPECT_NEAR(g.gradient(i), fd, 1e-5 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST(Dataset, RejectsBadCounts) {
  Dataset d = tiny_dataset(Eigen::Vector2d(1, 2), Eigen::Vector2d(3, 4));
  d.comp[1].z(1) = 2.5;
  EXPECT_THROW(d.validate(), DataError);
  d.comp[1].z(1) = -1;
  EXPECT_THROW(d.validate(), DataError);
  EXPECT_THROW(Dataset::make_component(Vector::Ones(2), Matrix::Ones(2, 1), Matrix::Ones(2, 1),
                                       Vector::Constant(2, 0.0)),
               DataError);
}

TEST(Dataset, LinearPredictorIncludesExposure) {
  Dataset d = tiny_dataset(Eigen::Vector2d(1, 2), Eigen::Vector2d(3, 4));
  d.comp[0] = Dataset::make_component(d.comp[0].z, d.comp[0].U, d.comp[0].X,
                                      Eigen::Vector2d(2.0, 0.5));
  const RegressionCoefficients beta{Vector::Constant(1, 1.0), Vector::Constant(1, -1.0)};
  const Vector eta = linear_predictor(d, beta);
  EXPECT_NEAR(eta(0), 1.0 + std::log(2.0), 1e-15);
  EXPECT_NEAR(eta(1), 1.0 + std::log(0.5), 1e-15);
  EXPECT_EQ(eta(2), -1.0);
}
