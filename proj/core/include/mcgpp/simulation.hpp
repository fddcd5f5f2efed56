#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mcgpp/inference.hpp"
#include "mcgpp/prediction.hpp"

namespace mcgpp {

enum class Scenario { One, Two };

/// Generator settings shared by both scenarios.
struct ScenarioOptions {
  double amplitude = 0.04;         ///< kernel amplitude v of every latent process
  double precision = 1.0;          ///< isotropic A of every latent process
  double gamma = 1.5;              ///< exponent of the gamma-exponential eta_2
  double mean_input_scale = 1.0;   ///< scenario 1 mean design U = (1, scale * x)
  Eigen::Index n_test = 20;        ///< test points per component
  bool zero_latent = false;        ///< debug hook: tau = 0
};

/// One simulated replicate: training data, test data and the true means.
struct ScenarioDraw {
  Dataset train;
  Dataset test;
  Vector mu_train;  ///< stacked true means at the training inputs
  Vector mu_test;   ///< stacked true means at the test inputs
  std::optional<RegressionCoefficients> beta_true;

  /// Test locations paired by index (requires equal test sizes per component).
  std::vector<NewPoint> test_points() const;
};

/// True latent hyperparameters: sq-exp shared pair and eta_1, gamma-exp eta_2.
MCGPHyperparams scenario_theta(const ScenarioOptions& options, Eigen::Index p);

/// Evenly spaced grid of n points covering [lo, hi].
Vector even_grid(double lo, double hi, Eigen::Index n);
/// Centers of n equal cells of [lo, hi]; never coincides with even_grid(lo, hi, n) for n >= 2.
Vector cell_center_grid(double lo, double hi, Eigen::Index n);

ScenarioDraw gen_scenario1(Eigen::Index n1, Eigen::Index n2, std::uint64_t seed,
                           const ScenarioOptions& options = {});
ScenarioDraw gen_scenario2(Eigen::Index n1, Eigen::Index n2, std::uint64_t seed,
                           const ScenarioOptions& options = {});

double rmse(const Vector& truth, const Vector& estimate);

/// Mean of |z - zhat| / (1 + z). A documented stand-in for an error rate.
double error_rate(const Vector& z_true, const Vector& z_hat);

/// Stream-splitting seed derivation (splitmix64 of master and stream).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

struct ModelConfig {
  std::string name;
  ModelSpec spec;
};

/// Models 1-4, CDR and Indep as compared in the simulation study.
std::vector<ModelConfig> comparison_models();

struct ScenarioConfig {
  Scenario scenario = Scenario::One;
  Eigen::Index n1 = 20;
  Eigen::Index n2 = 20;
  int n_replications = 1;
  std::uint64_t seed = 0;
  std::vector<ModelConfig> models = comparison_models();
  OptimOptions optim;
  ScenarioOptions generator;
  unsigned threads = 0;  ///< 0 uses the hardware concurrency

  void validate() const;
};

struct ResultRow {
  std::string model;
  std::string metric;
  double mean = 0.0;
  double std_err = 0.0;
  int n_ok = 0;
  int n_failed = 0;
};

struct ReplicationRecord {
  int replication = 0;
  std::string model;
  bool ok = false;
  double rmse_mu = 0.0;
  double loglik = 0.0;
  Vector beta_hat;
  std::string error;
};

struct ResultsTable {
  std::vector<ResultRow> rows;
  std::vector<ReplicationRecord> records;

  const ResultRow* find(const std::string& model, const std::string& metric) const;
  /// Header: model,metric,mean,std_err,n_ok,n_failed
  std::string to_csv() const;
  /// Header: model,replication,ok,rmse_mu,loglik
  std::string plot_data_csv() const;
};

/// Runs every model on n_replications simulated data sets. Failed fits are
/// counted in n_failed and excluded from the averages.
ResultsTable run_replications(const ScenarioConfig& config);

}  // namespace mcgpp
