#include "mcgpp/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "mcgpp/errors.hpp"
#include "mcgpp/glm.hpp"
#include "mcgpp/optim.hpp"

namespace mcgpp {

namespace {

double median_pairwise_distance(const StackedInputs& inputs) {
  Matrix all(inputs.size(), inputs.dim());
  all << inputs.x1, inputs.x2;
  std::vector<double> distances;
  distances.reserve(static_cast<std::size_t>(all.rows() * (all.rows() - 1) / 2));
  for (Eigen::Index i = 0; i < all.rows(); ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      const double d = (all.row(i) - all.row(j)).norm();
      if (d > 0.0) distances.push_back(d);
    }
  }
  if (distances.empty()) return 1.0;
  auto mid = distances.begin() + static_cast<std::ptrdiff_t>(distances.size() / 2);
  std::nth_element(distances.begin(), mid, distances.end());
  return *mid;
}

KernelParams kernel_with_variance(double zero_lag, double length, Eigen::Index p, CovFamily family) {
  const double a = 1.0 / (length * length);
  // zero_lag = pi^{p/2} v^2 |A|^{-1/2}
  const double v2 = zero_lag * std::pow(a, 0.5 * static_cast<double>(p)) /
                    std::pow(std::numbers::pi, 0.5 * static_cast<double>(p));
  return KernelParams::isotropic(std::sqrt(v2), a, p, family);
}

// Evaluates the Laplace marginal with a cached K (reused while only beta
// changes) and a warm-started latent mode.
class MarginalObjective {
 public:
  MarginalObjective(const Dataset& data, const ParameterMap& map, ModeOptions options)
      : data_(data), map_(map), options_(options), counts_(data.stacked_counts()) {}

  double operator()(const Vector& x) {
    const Vector theta_part = x.tail(map_.n_theta());
    if (!has_K_ || theta_part != cached_theta_) {
      K_ = latent_covariance(map_.theta(x), data_.inputs());
      cached_theta_ = theta_part;
      has_K_ = true;
    }
    const SiteTerms sites = SiteTerms::poisson(linear_predictor(data_, map_.beta(x)), counts_);
    const LaplaceResult r =
        laplace_log_integral(K_, sites, options_, warm_.size() ? &warm_ : nullptr);
    warm_ = r.mode.alpha;
    return r.log_integral;
  }

 private:
  const Dataset& data_;
  const ParameterMap& map_;
  ModeOptions options_;
  Vector counts_;
  bool has_K_ = false;
  Vector cached_theta_;
  Matrix K_;
  Vector warm_;
};

}  // namespace

LatentMode find_mode(const Dataset& data, const RegressionCoefficients& beta, const Matrix& K,
                     double tol, int max_iter) {
  const SiteTerms sites = SiteTerms::poisson(linear_predictor(data, beta), data.stacked_counts());
  LatentMode mode = find_latent_mode(K, sites, {tol, max_iter});
  if (!mode.converged) {
    throw ConvergenceError("find_mode: no convergence after " + std::to_string(mode.iterations) +
                               " iterations",
                           mode.grad_norm);
  }
  return mode;
}

double laplace_marginal_loglik(const RegressionCoefficients& beta, const Hyperparams& theta,
                               const Dataset& data, const ModeOptions& options) {
  data.validate();
  const Matrix K = latent_covariance(theta, data.inputs());
  const SiteTerms sites = SiteTerms::poisson(linear_predictor(data, beta), data.stacked_counts());
  return laplace_log_integral(K, sites, options).log_integral;
}

Vector initial_parameters(const Dataset& data, const ParameterMap& map) {
  RegressionCoefficients beta;
  double sum_sq = 0.0;
  double sum = 0.0;
  for (int a = 0; a < 2; ++a) {
    const auto& c = data.comp[a];
    const GlmFit glm = fit_poisson_glm(c.U, c.z, c.log_exposure);
    beta[a] = glm.beta;
    const Vector mu = (c.U * glm.beta + c.log_exposure).array().exp().matrix();
    const Vector r = (c.z - mu).cwiseQuotient(mu);
    sum += r.sum();
    sum_sq += r.squaredNorm();
  }
  const double n = static_cast<double>(data.total());
  const double var_r = n > 1 ? (sum_sq - sum * sum / n) / (n - 1.0) : 1.0;
  const double zero_lag = std::clamp(0.1 * var_r, 1e-3, 10.0);
  const double length = median_pairwise_distance(data.inputs());
  const Eigen::Index p = data.dim();
  const ModelSpec& spec = map.spec();

  Hyperparams theta;
  switch (spec.kind) {
    case ModelKind::Mcgpp: {
      MCGPHyperparams t;
      t.shared_family = spec.shared;
      t.xi1 = kernel_with_variance(zero_lag, length, p, spec.shared);
      t.xi2 = kernel_with_variance(zero_lag, length, p, spec.shared);
      t.eta1 = {spec.eta1, kernel_with_variance(zero_lag, length, p, spec.eta1)};
      t.eta2 = {spec.eta2, kernel_with_variance(zero_lag, length, p, spec.eta2)};
      theta = t;
      break;
    }
    case ModelKind::Cdr: {
      CDRHyperparams t;
      t.theta1 = kernel_with_variance(zero_lag, length, p, CovFamily::SquaredExponential);
      t.alpha = 0.0;
      t.sigma_eps2 = zero_lag;
      theta = t;
      break;
    }
    case ModelKind::Indep: {
      IndepHyperparams t;
      t.k1 = kernel_with_variance(zero_lag, length, p, CovFamily::SquaredExponential);
      t.k2 = kernel_with_variance(zero_lag, length, p, CovFamily::SquaredExponential);
      theta = t;
      break;
    }
  }
  return map.pack(beta, theta);
}

FittedModel refresh_model(const Dataset& data, const ModelSpec& spec, const Vector& params,
                          const ModeOptions& mode_options) {
  const ParameterMap map(spec, data.comp[0].U.cols(), data.comp[1].U.cols(), data.dim());
  FittedModel model;
  model.spec = spec;
  model.params = params;
  model.beta = map.beta(params);
  model.theta = map.theta(params);
  model.n_params = static_cast<int>(map.size());
  model.mode_options = mode_options;
  const Matrix K = latent_covariance(model.theta, data.inputs());
  const SiteTerms sites =
      SiteTerms::poisson(linear_predictor(data, model.beta), data.stacked_counts());
  const LaplaceResult r = laplace_log_integral(K, sites, mode_options);
  model.loglik = r.log_integral;
  model.tau0 = r.mode.tau;
  model.K_factor = chol_psd(K);
  return model;
}

FittedModel fit(const Dataset& data, const ModelSpec& spec, const OptimOptions& options) {
  data.validate();
  if (spec.kind == ModelKind::Cdr && !paired_inputs(data)) {
    throw UnsupportedData(
        "CDR model requires both components observed at the same inputs in the same order");
  }
  const ParameterMap map(spec, data.comp[0].U.cols(), data.comp[1].U.cols(), data.dim());
  const Vector x0 = initial_parameters(data, map);
  const ModeOptions mode_options = options.mode();

  BfgsOptions bfgs;
  bfgs.max_iter = options.max_iter;
  bfgs.grad_step = options.grad_step;
  bfgs.grad_tol = options.grad_tol;
  bfgs.f_tol = options.outer_tol;

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  struct Candidate {
    Vector x;
    double f;
    bool converged;
    int iterations;
  };
  std::vector<Candidate> candidates;
  std::vector<StartDiagnostics> diagnostics;
  const int n_starts = options.max_iter <= 0 ? 1 : std::max(1, options.n_starts);
  for (int start = 0; start < n_starts; ++start) {
    Vector x = x0;
    if (start > 0) {
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        x[i] += (i < map.n_beta() ? 0.1 : 1.0) * normal(rng);
      }
    }
    StartDiagnostics diag;
    diag.start = start;
    try {
      MarginalObjective objective(data, map, mode_options);
      const BfgsResult r = maximize_bfgs(std::ref(objective), x, bfgs);
      diag.loglik = r.f;
      diag.grad_norm = r.grad_norm;
      diag.iterations = r.iterations;
      diag.converged = r.converged;
      diag.message = r.message;
      candidates.push_back({r.x, r.f, r.converged, r.iterations});
    } catch (const Error& e) {
      diag.message = std::string("failed: ") + e.what();
      diag.loglik = -std::numeric_limits<double>::infinity();
    }
    diagnostics.push_back(diag);
  }
  if (candidates.empty()) {
    std::ostringstream msg;
    msg << "fit: all " << n_starts << " starts failed";
    for (const auto& d : diagnostics) msg << "; start " << d.start << ": " << d.message;
    throw FitError(msg.str());
  }

  const auto theta_norm = [&](const Vector& x) { return x.tail(map.n_theta()).norm(); };
  const auto best = std::max_element(
      candidates.begin(), candidates.end(), [&](const Candidate& a, const Candidate& b) {
        if (a.f != b.f) return a.f < b.f;
        return theta_norm(a.x) > theta_norm(b.x);
      });

  FittedModel model = refresh_model(data, spec, best->x, mode_options);
  model.converged = best->converged;
  model.iterations = best->iterations;
  model.starts = std::move(diagnostics);
  return model;
}

double aic(double loglik, int n_params) { return -2.0 * loglik + 2.0 * n_params; }

double aic(const FittedModel& model) { return aic(model.loglik, model.n_params); }

Vector beta_standard_errors(const FittedModel& model, const Dataset& data) {
  const ParameterMap map(model.spec, data.comp[0].U.cols(), data.comp[1].U.cols(), data.dim());
  const Eigen::Index nb = map.n_beta();
  MarginalObjective objective(data, map, model.mode_options);
  const Objective in_beta = [&](const Vector& b) {
    Vector x = model.params;
    x.head(nb) = b;
    return objective(x);
  };
  const Matrix H = central_hessian(in_beta, model.params.head(nb), 1e-3);
  const Matrix cov = (-H).inverse();
  return cov.diagonal().cwiseMax(0.0).cwiseSqrt();
}

}  // namespace mcgpp
