#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "mcgpp/inference.hpp"
#include "mcgpp/prediction.hpp"

namespace mcgpp {

/// Dataset CSV: columns `component` (1 or 2), `z`, `u_1..u_q`, `x_1..x_p` and
/// an optional `exposure` (E = 1 when absent). An intercept column is
/// prepended to U unless add_intercept is false. Row numbers in errors count
/// data records from 1, not including the header.
Dataset read_dataset_csv(std::istream& in, bool add_intercept = true);
Dataset load_dataset(const std::filesystem::path& path, bool add_intercept = true);

/// Writes the dataset in the same schema. With drop_first_u the first column
/// of U (the intercept) is left out so the file reads back with add_intercept.
void write_dataset_csv(std::ostream& out, const Dataset& data, bool drop_first_u = true);

/// New-point CSV. Covariates and inputs are given per component
/// (`u1_k`, `u2_k`, `x1_k`, `x2_k`) or shared by both (`u_k`, `x_k`);
/// optional `exposure1`, `exposure2`. The intercept is added as for datasets.
std::vector<NewPoint> read_points_csv(std::istream& in, bool add_intercept = true);
std::vector<NewPoint> load_points(const std::filesystem::path& path, bool add_intercept = true);

/// Header: point,mean1,mean2,var1,var2,cross_cov
void write_predictions_csv(std::ostream& out, const std::vector<PredictionResult>& results);

/// Versioned JSON document holding the model and the training data it was fitted to.
std::string model_to_json(const FittedModel& model, const Dataset& data);
/// Inverse of model_to_json. Stored beta, tau0 and loglik are kept as written;
/// theta and the covariance factor are rebuilt from the stored parameters.
std::pair<FittedModel, Dataset> model_from_json(const std::string& text);

void save_model(const std::filesystem::path& path, const FittedModel& model, const Dataset& data);
std::pair<FittedModel, Dataset> load_model(const std::filesystem::path& path);

/// Short plain-text description of a fit.
std::string model_summary(const FittedModel& model);

inline constexpr int kModelFormatVersion = 1;

}  // namespace mcgpp
