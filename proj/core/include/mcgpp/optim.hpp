#pragma once

#include <functional>
#include <string>

#include "mcgpp/kernels.hpp"

namespace mcgpp {

using Objective = std::function<double(const Vector&)>;

/// Central-difference gradient with step h in every coordinate.
Vector central_gradient(const Objective& f, const Vector& x, double h);

/// Central-difference Hessian (symmetrized), 2 n^2 + 1 evaluations.
Matrix central_hessian(const Objective& f, const Vector& x, double h);

struct BfgsOptions {
  int max_iter = 200;
  double grad_step = 1e-4;  ///< finite-difference step
  double grad_tol = 1e-4;   ///< converged when ||grad||_inf falls below this
  double f_tol = 1e-6;      ///< relative objective change treated as a stalled step
  double max_step = 2.0;    ///< cap on the infinity norm of a single step
};

struct BfgsResult {
  Vector x;
  double f = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  std::string message;
};

/// Maximizes f with BFGS on numerical gradients and a backtracking Armijo line
/// search. Evaluations that throw or return non-finite values count as -inf.
BfgsResult maximize_bfgs(const Objective& f, const Vector& x0, const BfgsOptions& options);

}  // namespace mcgpp
