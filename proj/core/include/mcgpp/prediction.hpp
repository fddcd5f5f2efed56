#pragma once

#include <array>
#include <span>
#include <vector>

#include "mcgpp/inference.hpp"

namespace mcgpp {

/// A new location for both components: mean covariates, covariance inputs and
/// log exposures.
struct NewPoint {
  Vector u1;
  Vector u2;
  Vector x1;
  Vector x2;
  double log_exposure1 = 0.0;
  double log_exposure2 = 0.0;
};

struct PredictionResult {
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  Eigen::Matrix2d var = Eigen::Matrix2d::Zero();  ///< Var on the diagonal, Cov(z1*, z2*) off it
  std::vector<Vector> latent_mode;                ///< tau_+ mode per weight vector, see kMomentWeights
};

/// Weight vectors for which latent modes are stored in PredictionResult:
/// (0,0) normalizer, (1,0), (0,1), (2,0), (0,2), (1,1).
inline constexpr std::array<std::array<int, 2>, 6> kMomentWeights{
    {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {0, 2}, {1, 1}}};

/// E[exp(w1 log mu1* + w2 log mu2*) | D] as a ratio of two Laplace
/// approximations on the augmented (n1 + n2 + 2)-dimensional latent vector.
/// The mode is recomputed for the given weights.
double latent_moment(const FittedModel& model, const Dataset& data, const NewPoint& point,
                     std::array<int, 2> weights);

/// Predictive mean, variance and cross-covariance at one new point.
/// Throws NumericalFailure if a mixing variance is negative beyond rounding.
PredictionResult predict(const FittedModel& model, const Dataset& data, const NewPoint& point);

Eigen::Vector2d predict_mean(const FittedModel& model, const Dataset& data, const NewPoint& point);
Eigen::Vector2d predict_var(const FittedModel& model, const Dataset& data, const NewPoint& point);
double predict_cross_cov(const FittedModel& model, const Dataset& data, const NewPoint& point);

/// Pointwise prediction over many new points.
std::vector<PredictionResult> predict_batch(const FittedModel& model, const Dataset& data,
                                            std::span<const NewPoint> points);

}  // namespace mcgpp
