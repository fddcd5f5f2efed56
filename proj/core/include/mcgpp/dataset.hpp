#pragma once

#include <array>
#include <optional>

#include "mcgpp/covariance.hpp"

namespace mcgpp {

/// Observations of one output component.
struct ComponentData {
  Vector z;             ///< nonnegative integer counts
  Matrix U;             ///< mean covariates, n x q (intercept column included by the caller)
  Matrix X;             ///< covariance inputs, n x p
  Vector log_exposure;  ///< log E, zeros when no exposure is given

  Eigen::Index size() const { return z.size(); }
};

/// Two-component count data. Rows need not be paired across components.
struct Dataset {
  std::array<ComponentData, 2> comp;

  static ComponentData make_component(Vector z, Matrix U, Matrix X,
                                      std::optional<Vector> exposure = std::nullopt);

  Eigen::Index n(int a) const { return comp[a].size(); }
  Eigen::Index total() const { return n(0) + n(1); }
  Eigen::Index dim() const { return comp[0].X.cols(); }
  StackedInputs inputs() const { return {comp[0].X, comp[1].X}; }
  Vector stacked_counts() const;

  /// Throws DataError when counts, exposures or shapes are inconsistent.
  void validate() const;
};

struct RegressionCoefficients {
  Vector beta1;
  Vector beta2;

  const Vector& operator[](int a) const { return a == 0 ? beta1 : beta2; }
  Vector& operator[](int a) { return a == 0 ? beta1 : beta2; }
};

/// Stacked U_a beta_a + log E_a, the linear predictor without the latent field.
Vector linear_predictor(const Dataset& data, const RegressionCoefficients& beta);

/// True when both components observe exactly the same inputs in the same order.
bool paired_inputs(const Dataset& data);

}  // namespace mcgpp
