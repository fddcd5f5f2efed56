#include "mcgpp/dataset.hpp"

#include <cmath>
#include <string>

#include "mcgpp/errors.hpp"

namespace mcgpp {

ComponentData Dataset::make_component(Vector z, Matrix U, Matrix X, std::optional<Vector> exposure) {
  ComponentData c;
  c.log_exposure = Vector::Zero(z.size());
  if (exposure) {
    if (exposure->size() != z.size()) throw DataError("exposure length differs from counts");
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      if (!((*exposure)[i] > 0.0) || !std::isfinite((*exposure)[i])) {
        throw DataError("exposure must be positive", static_cast<std::size_t>(i + 1));
      }
      c.log_exposure[i] = std::log((*exposure)[i]);
    }
  }
  c.z = std::move(z);
  c.U = std::move(U);
  c.X = std::move(X);
  return c;
}

Vector Dataset::stacked_counts() const {
  Vector z(total());
  z << comp[0].z, comp[1].z;
  return z;
}

void Dataset::validate() const {
  for (int a = 0; a < 2; ++a) {
    const auto& c = comp[a];
    const std::string who = "component " + std::to_string(a + 1);
    if (c.size() < 1) throw DataError(who + " has no observations");
    if (c.U.rows() != c.size() || c.X.rows() != c.size() || c.log_exposure.size() != c.size()) {
      throw DataError(who + ": row counts of z, U, X and exposure differ");
    }
    if (c.U.cols() < 1) throw DataError(who + ": mean design has no columns");
    for (Eigen::Index i = 0; i < c.size(); ++i) {
      const double z = c.z[i];
      if (!(z >= 0.0) || std::floor(z) != z || !std::isfinite(z)) {
        throw DataError(who + ": count must be a nonnegative integer", static_cast<std::size_t>(i + 1));
      }
    }
    if (!c.U.allFinite() || !c.X.allFinite() || !c.log_exposure.allFinite()) {
      throw DataError(who + ": non-finite covariate or exposure");
    }
  }
  if (comp[0].X.cols() != comp[1].X.cols() || comp[0].X.cols() < 1) {
    throw DataError("components have different covariance-input dimensions");
  }
}

Vector linear_predictor(const Dataset& data, const RegressionCoefficients& beta) {
  Vector eta(data.total());
  for (int a = 0; a < 2; ++a) {
    const auto& c = data.comp[a];
    if (beta[a].size() != c.U.cols()) {
      throw DimensionError("coefficient length differs from the mean design of component " +
                           std::to_string(a + 1));
    }
    eta.segment(a == 0 ? 0 : data.n(0), c.size()) = c.U * beta[a] + c.log_exposure;
  }
  return eta;
}

bool paired_inputs(const Dataset& data) {
  return data.n(0) == data.n(1) && data.comp[0].X == data.comp[1].X;
}

}  // namespace mcgpp
