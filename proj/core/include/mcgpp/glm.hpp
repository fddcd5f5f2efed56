#pragma once

#include "mcgpp/kernels.hpp"

namespace mcgpp {

struct GlmFit {
  Vector beta;
  int iterations = 0;
  bool converged = false;
};

/// Poisson log-link regression of z on U with a known offset, by iteratively
/// reweighted least squares. A small ridge is added only if the weighted
/// normal equations are singular.
GlmFit fit_poisson_glm(const Matrix& U, const Vector& z, const Vector& offset,
                       int max_iter = 100, double tol = 1e-10);

}  // namespace mcgpp
