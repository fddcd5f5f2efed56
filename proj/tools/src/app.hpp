#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mcgpp/inference.hpp"
#include "mcgpp/simulation.hpp"

namespace mcgpp::app {

struct DiagnoseConfig {
  std::vector<CovFamily> families{CovFamily::SquaredExponential, CovFamily::Matern,
                                  CovFamily::GammaExponential, CovFamily::RationalQuadratic};
  double amplitude = 1.0;
  double precision = 1.0;
  double delta = 1.0;
  Eigen::Index min_n = 10;
  Eigen::Index max_n = 400;
  int n_sizes = 8;
  int draws = 20;
  int audit_draws = 100;
};

/// Everything a command may read. Loaded from JSON, then overridden by flags.
struct RunConfig {
  std::filesystem::path data;
  std::filesystem::path fitted;
  std::filesystem::path points;
  std::filesystem::path out = ".";
  bool no_intercept = false;
  std::uint64_t seed = 0;
  ModelSpec model = ModelSpec::mcgpp(CovFamily::SquaredExponential, CovFamily::SquaredExponential,
                                     CovFamily::SquaredExponential);
  OptimOptions optimizer;
  ScenarioConfig simulation;
  std::optional<ModelKind> model_filter;  ///< simulate: restrict to one model kind
  DiagnoseConfig diagnose;
};

/// Parses a JSON config. Unknown keys and wrongly typed values are rejected
/// with InvalidParameter naming the offending key.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::filesystem::path& path);

int run_fit(const RunConfig& config);
int run_predict(const RunConfig& config);
int run_simulate(const RunConfig& config);
int run_diagnose(const RunConfig& config);

/// Entry point shared by the executable and the tests. Errors are reported as
/// a JSON object on stderr (and in <out>/error.json) with a nonzero status.
int main(int argc, char** argv);

}  // namespace mcgpp::app
