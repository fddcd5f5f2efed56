#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "mcgpp/errors.hpp"
#include "mcgpp/optim.hpp"

using namespace mcgpp;

TEST(CentralDifferences, QuadraticGradientAndHessian) {
  Matrix A(2, 2);
  A << 3, 1, 1, 2;
  const Objective f = [&](const Vector& x) { return -0.5 * x.dot(A * x) + x(0); };
  const Vector x = Eigen::Vector2d(0.3, -0.7);
  EXPECT_LT((central_gradient(f, x, 1e-4) - (-A * x + Eigen::Vector2d(1, 0))).norm(), 1e-9);
  EXPECT_LT((central_hessian(f, x, 1e-3) + A).norm(), 1e-6);
}

TEST(Bfgs, ConcaveQuadratic) {
  const Objective f = [](const Vector& x) {
    return -(x(0) - 1) * (x(0) - 1) - 4 * (x(1) + 2) * (x(1) + 2) - (x(0) - 1) * (x(1) + 2);
  };
  const BfgsResult r = maximize_bfgs(f, Vector::Zero(2), {});
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.x(0), 1.0, 1e-5);
  EXPECT_NEAR(r.x(1), -2.0, 1e-5);
}

TEST(Bfgs, Rosenbrock) {
  const Objective f = [](const Vector& x) {
    return -(100 * std::pow(x(1) - x(0) * x(0), 2) + std::pow(1 - x(0), 2));
  };
  BfgsOptions o;
  o.max_iter = 500;
  o.grad_step = 1e-6;
  o.grad_tol = 1e-7;
  o.f_tol = 1e-14;
  const BfgsResult r = maximize_bfgs(f, Eigen::Vector2d(-1.2, 1.0), o);
  EXPECT_NEAR(r.x(0), 1.0, 1e-3);
  EXPECT_NEAR(r.x(1), 1.0, 2e-3);
}

TEST(Bfgs, ZeroIterationsReturnsStart) {
  const Objective f = [](const Vector& x) { return -x.squaredNorm(); };
  BfgsOptions o;
  o.max_iter = 0;
  const Vector x0 = Eigen::Vector2d(1, 2);
  const BfgsResult r = maximize_bfgs(f, x0, o);
  EXPECT_EQ(r.x, x0);
  EXPECT_FALSE(r.converged);
}

TEST(Bfgs, FailingRegionIsAvoided) {
  // Throws beyond x = 1.5; the maximum at x = 1 is still found.
  const Objective f = [](const Vector& x) {
    if (x(0) > 1.5) throw std::runtime_error("outside domain");
    return -(x(0) - 1) * (x(0) - 1);
  };
  const BfgsResult r = maximize_bfgs(f, Vector::Constant(1, -3.0), {});
  EXPECT_NEAR(r.x(0), 1.0, 1e-4);
}

TEST(Bfgs, NonFiniteStartThrows) {
  const Objective f = [](const Vector&) { return std::nan(""); };
  EXPECT_THROW(maximize_bfgs(f, Vector::Zero(1), {}), Error);
}
