#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "mcgpp/baselines.hpp"
#include "mcgpp/covariance.hpp"
#include "mcgpp/dataset.hpp"

namespace mcgpp {

enum class ModelKind { Mcgpp, Cdr, Indep };

std::string_view to_string(ModelKind kind);
ModelKind model_kind_from_string(std::string_view name);

/// Which latent model to fit, and the covariance family of each process.
/// Families are only read for the MCGPP model.
struct ModelSpec {
  ModelKind kind = ModelKind::Mcgpp;
  CovFamily shared = CovFamily::SquaredExponential;
  CovFamily eta1 = CovFamily::SquaredExponential;
  CovFamily eta2 = CovFamily::SquaredExponential;
  bool optimize_shape = true;

  static ModelSpec mcgpp(CovFamily shared, CovFamily eta1, CovFamily eta2);
  static ModelSpec cdr();
  static ModelSpec indep();
};

using Hyperparams = std::variant<MCGPHyperparams, CDRHyperparams, IndepHyperparams>;

std::unique_ptr<BivariateCovariance> make_covariance(const Hyperparams& theta);

/// Stacked K of the training inputs for any of the three latent models.
Matrix latent_covariance(const Hyperparams& theta, const StackedInputs& inputs);

/// Maps the unconstrained optimization vector to (beta, theta) and back.
///
/// Layout: beta_1, beta_2, then per-process (log v^2, log diag A) and finally
/// shape parameters. Log-scale quantities are squashed into a wide box with a
/// logistic map so that no coordinate can run off to infinity.
class ParameterMap {
 public:
  ParameterMap(const ModelSpec& spec, Eigen::Index q1, Eigen::Index q2, Eigen::Index p);

  Eigen::Index size() const { return static_cast<Eigen::Index>(slots_.size()) + n_beta(); }
  Eigen::Index n_beta() const { return q1_ + q2_; }
  Eigen::Index n_theta() const { return static_cast<Eigen::Index>(slots_.size()); }
  const ModelSpec& spec() const { return spec_; }

  RegressionCoefficients beta(const Vector& x) const;
  Hyperparams theta(const Vector& x) const;
  Vector pack(const RegressionCoefficients& beta, const Hyperparams& theta) const;
  std::vector<std::string> names() const;

 private:
  enum class Transform { BoundedLog, Bounded, Identity };
  struct Slot {
    std::string name;
    Transform transform;
    double lo;
    double hi;
  };

  double to_natural(const Slot& slot, double s) const;
  double to_unconstrained(const Slot& slot, double value) const;
  void add_kernel_slots(const std::string& prefix);

  ModelSpec spec_;
  Eigen::Index q1_;
  Eigen::Index q2_;
  Eigen::Index p_;
  std::vector<Slot> slots_;
};

}  // namespace mcgpp
