#include "mcgpp/prediction.hpp"

#include <cmath>
#include <sstream>

#include "mcgpp/errors.hpp"

namespace mcgpp {

namespace {

// Slack, in nats, for log(m2) - 2 log(m1) < 0. Each log moment carries the mode
// tolerance, so tiny posterior variances can land just below zero.
constexpr double kMixingTolerance = 1e-6;

class MomentEngine {
 public:
  MomentEngine(const FittedModel& model, const Dataset& data, const NewPoint& point)
      : model_(model) {
    if (point.u1.size() != data.comp[0].U.cols() || point.u2.size() != data.comp[1].U.cols()) {
      throw DimensionError("prediction: new-point covariate length differs from the design");
    }
    K_plus_ = make_covariance(model.theta)->stacked_plus(data.inputs(), point.x1, point.x2);
    base_ = SiteTerms::poisson(linear_predictor(data, model.beta), data.stacked_counts());
    star_offset_ = Eigen::Vector2d(point.u1.dot(model.beta.beta1) + point.log_exposure1,
                                   point.u2.dot(model.beta.beta2) + point.log_exposure2);
    const Eigen::Index n1 = data.n(0);
    const Eigen::Index n = data.total();
    std::vector<Eigen::Index> first(static_cast<std::size_t>(n1)), second;
    for (Eigen::Index i = 0; i < n1; ++i) first[static_cast<std::size_t>(i)] = i;
    for (Eigen::Index i = n1; i < n; ++i) second.push_back(i);
    first.push_back(n);
    second.push_back(n + 1);
    independent_ = true;
    for (const auto i : first) {
      for (const auto j : second) independent_ = independent_ && K_plus_(i, j) == 0.0;
    }
    const LaplaceResult norm = run({0, 0});
    log_normalizer_ = norm.log_integral;
    warm_ = norm.mode.alpha;
    normalizer_mode_ = norm.mode.tau;
  }

  /// The two components are a posteriori independent when K_+ has no cross terms.
  bool independent() const { return independent_; }

  /// log E[exp(w' log mu*) | D] and the mode used for it.
  std::pair<double, Vector> log_moment(std::array<int, 2> w) {
    if (w[0] == 0 && w[1] == 0) return {0.0, normalizer_mode_};
    const LaplaceResult r = run(w);
    return {r.log_integral - log_normalizer_, r.mode.tau};
  }

 private:
  LaplaceResult run(std::array<int, 2> w) const {
    const SiteTerms sites = base_.with_linear(
        star_offset_, Eigen::Vector2d(static_cast<double>(w[0]), static_cast<double>(w[1])));
    return laplace_log_integral(K_plus_, sites, model_.mode_options,
                                warm_.size() ? &warm_ : nullptr);
  }

  const FittedModel& model_;
  Matrix K_plus_;
  SiteTerms base_;
  Vector star_offset_;
  bool independent_ = false;
  double log_normalizer_ = 0.0;
  Vector warm_;
  Vector normalizer_mode_;
};

}  // namespace

double latent_moment(const FittedModel& model, const Dataset& data, const NewPoint& point,
                     std::array<int, 2> weights) {
  if (weights[0] < 0 || weights[1] < 0) {
    throw InvalidParameter("latent_moment: weights must be nonnegative");
  }
  MomentEngine engine(model, data, point);
  return std::exp(engine.log_moment(weights).first);
}

PredictionResult predict(const FittedModel& model, const Dataset& data, const NewPoint& point) {
  MomentEngine engine(model, data, point);
  PredictionResult out;
  std::array<double, kMomentWeights.size()> log_moment{}, moment{};
  for (std::size_t k = 0; k < kMomentWeights.size(); ++k) {
    auto [log_m, mode] = engine.log_moment(kMomentWeights[k]);
    log_moment[k] = log_m;
    moment[k] = std::exp(log_m);
    out.latent_mode.push_back(std::move(mode));
  }
  const double m1 = moment[1], m2 = moment[2];
  out.mean = Eigen::Vector2d(m1, m2);

  const auto mixing = [&](std::size_t second, std::size_t first) {
    const double gap = log_moment[second] - 2.0 * log_moment[first];
    if (gap < -kMixingTolerance) {
      std::ostringstream msg;
      msg << "prediction: negative mixing variance (log ratio " << gap
          << "), Laplace approximation broke down";
      throw NumericalFailure(msg.str());
    }
    return moment[first] * moment[first] * std::expm1(std::max(gap, 0.0));
  };
  out.var(0, 0) = m1 + mixing(3, 1);
  out.var(1, 1) = m2 + mixing(4, 2);
  out.var(0, 1) = out.var(1, 0) = engine.independent()
                                      ? 0.0
                                      : m1 * m2 * std::expm1(log_moment[5] - log_moment[1] - log_moment[2]);
  return out;
}

Eigen::Vector2d predict_mean(const FittedModel& model, const Dataset& data, const NewPoint& point) {
  MomentEngine engine(model, data, point);
  return {std::exp(engine.log_moment({1, 0}).first), std::exp(engine.log_moment({0, 1}).first)};
}

Eigen::Vector2d predict_var(const FittedModel& model, const Dataset& data, const NewPoint& point) {
  return predict(model, data, point).var.diagonal();
}

double predict_cross_cov(const FittedModel& model, const Dataset& data, const NewPoint& point) {
  return predict(model, data, point).var(0, 1);
}

std::vector<PredictionResult> predict_batch(const FittedModel& model, const Dataset& data,
                                            std::span<const NewPoint> points) {
  std::vector<PredictionResult> out;
  out.reserve(points.size());
  for (const auto& point : points) out.push_back(predict(model, data, point));
  return out;
}

}  // namespace mcgpp
