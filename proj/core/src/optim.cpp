#include "mcgpp/optim.hpp"

#include <cmath>
#include <limits>

#include "mcgpp/errors.hpp"

namespace mcgpp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_eval(const Objective& f, const Vector& x, int& evaluations) {
  ++evaluations;
  try {
    const double value = f(x);
    return std::isfinite(value) ? value : kNegInf;
  } catch (const Error&) {
    return kNegInf;
  }
}

}  // namespace

Vector central_gradient(const Objective& f, const Vector& x, double h) {
  Vector g(x.size());
  Vector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double up = f(probe);
    probe[i] = x[i] - h;
    const double down = f(probe);
    probe[i] = x[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

Matrix central_hessian(const Objective& f, const Vector& x, double h) {
  const Eigen::Index n = x.size();
  Matrix H(n, n);
  const double f0 = f(x);
  Vector probe = x;
  for (Eigen::Index i = 0; i < n; ++i) {
    probe[i] = x[i] + h;
    const double up = f(probe);
    probe[i] = x[i] - h;
    const double down = f(probe);
    probe[i] = x[i];
    H(i, i) = (up - 2.0 * f0 + down) / (h * h);
    for (Eigen::Index j = 0; j < i; ++j) {
      probe[i] = x[i] + h;
      probe[j] = x[j] + h;
      const double pp = f(probe);
      probe[j] = x[j] - h;
      const double pm = f(probe);
      probe[i] = x[i] - h;
      const double mm = f(probe);
      probe[j] = x[j] + h;
      const double mp = f(probe);
      probe[i] = x[i];
      probe[j] = x[j];
      H(i, j) = H(j, i) = (pp - pm - mp + mm) / (4.0 * h * h);
    }
  }
  return H;
}

BfgsResult maximize_bfgs(const Objective& f, const Vector& x0, const BfgsOptions& options) {
  const Eigen::Index n = x0.size();
  BfgsResult result;
  result.x = x0;
  result.f = safe_eval(f, x0, result.evaluations);
  if (!std::isfinite(result.f)) {
    throw NumericalFailure("maximize_bfgs: objective is not finite at the starting point");
  }
  if (options.max_iter <= 0 || n == 0) {
    result.message = "no iterations requested";
    return result;
  }

  // Work with the minimization of -f.
  auto grad_of = [&](const Vector& x) {
    result.evaluations += static_cast<int>(2 * n);
    return Vector(-central_gradient(
        [&](const Vector& p) {
          const double v = f(p);
          if (!std::isfinite(v)) throw NumericalFailure("non-finite objective in gradient");
          return v;
        },
        x, options.grad_step));
  };

  Vector g = grad_of(result.x);
  Matrix Hinv = Matrix::Identity(n, n);
  bool scaled = false;
  int stalls = 0;

  for (result.iterations = 0; result.iterations < options.max_iter;) {
    result.grad_norm = g.cwiseAbs().maxCoeff();
    if (result.grad_norm < options.grad_tol) {
      result.converged = true;
      result.message = "gradient tolerance reached";
      return result;
    }
    Vector direction = -Hinv * g;
    double slope = g.dot(direction);
    if (!(slope < 0.0)) {
      Hinv.setIdentity();
      direction = -g;
      slope = g.dot(direction);
    }
    const double longest = direction.cwiseAbs().maxCoeff();
    if (longest > options.max_step) {
      direction *= options.max_step / longest;
      slope *= options.max_step / longest;
    }

    double t = 1.0;
    double f_new = kNegInf;
    Vector x_new;
    bool accepted = false;
    for (int k = 0; k < 40; ++k) {
      x_new = result.x + t * direction;
      f_new = safe_eval(f, x_new, result.evaluations);
      // Armijo on -f: -f_new <= -f + c t slope.
      if (f_new >= result.f - 1e-4 * t * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    ++result.iterations;
    if (!accepted) {
      if (scaled) {
        // Retry once along steepest ascent before giving up.
        Hinv.setIdentity();
        scaled = false;
        continue;
      }
      result.message = "line search failed";
      result.converged = result.grad_norm < 10.0 * options.grad_tol;
      return result;
    }

    Vector g_new;
    try {
      g_new = grad_of(x_new);
    } catch (const Error&) {
      result.message = "gradient evaluation failed";
      return result;
    }
    const Vector s = x_new - result.x;
    const Vector y = g_new - g;
    const double change = f_new - result.f;
    result.x = x_new;
    result.f = f_new;
    g = g_new;

    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (!scaled) {
        Hinv *= sy / y.squaredNorm();
        scaled = true;
      }
      const double rho = 1.0 / sy;
      const Matrix I = Matrix::Identity(n, n);
      Hinv = (I - rho * s * y.transpose()) * Hinv * (I - rho * y * s.transpose()) +
             rho * s * s.transpose();
    }

    if (std::abs(change) <= options.f_tol * (1.0 + std::abs(result.f)) &&
        s.cwiseAbs().maxCoeff() < 1e-6) {
      if (++stalls >= 2) {
        result.grad_norm = g.cwiseAbs().maxCoeff();
        result.converged = true;
        result.message = "step size and objective change below tolerance";
        return result;
      }
    } else {
      stalls = 0;
    }
  }
  result.grad_norm = g.cwiseAbs().maxCoeff();
  result.converged = result.grad_norm < options.grad_tol;
  result.message = "iteration limit reached";
  return result;
}

}  // namespace mcgpp
