#include "mcgpp/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "mcgpp/errors.hpp"

namespace mcgpp {

namespace {

Matrix column(const Vector& v) { return Matrix(v); }

Vector draw_counts(const Vector& mu, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Vector z(mu.size());
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    if (!std::isfinite(mu(i)) || mu(i) < 0.0)
      throw NumericalFailure("simulated mean is not a finite nonnegative number");
    std::poisson_distribution<long long> pois(mu(i));
    z(i) = static_cast<double>(pois(rng));
  }
  return z;
}

Vector permuted(const Vector& v, std::uint64_t seed) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(v.size()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  Vector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out(i) = v(idx[static_cast<std::size_t>(i)]);
  return out;
}

// Latent draw over train and test jointly; returns (train tau stacked, test tau stacked).
std::pair<Vector, Vector> joint_latent(const Matrix& x1_train, const Matrix& x2_train,
                                       const Matrix& x1_test, const Matrix& x2_test,
                                       const MCGPHyperparams& theta, bool zero,
                                       std::uint64_t seed) {
  const Eigen::Index n1 = x1_train.rows(), n2 = x2_train.rows();
  const Eigen::Index m1 = x1_test.rows(), m2 = x2_test.rows();
  Vector train = Vector::Zero(n1 + n2), test = Vector::Zero(m1 + m2);
  if (zero) return {train, test};
  StackedInputs all;
  all.x1.resize(n1 + m1, x1_train.cols());
  all.x1 << x1_train, x1_test;
  all.x2.resize(n2 + m2, x2_train.cols());
  all.x2 << x2_train, x2_test;
  auto [t1, t2] = sample_mcgp(all, theta, seed);
  train << t1.head(n1), t2.head(n2);
  test << t1.tail(m1), t2.tail(m2);
  return {train, test};
}

void fill_component(Dataset& data, int a, const Matrix& U, const Matrix& X, const Vector& z) {
  data.comp[a] = Dataset::make_component(z, U, X);
}

}  // namespace

std::vector<NewPoint> ScenarioDraw::test_points() const {
  if (test.n(0) != test.n(1))
    throw DimensionError("test points are paired by index; component sizes differ");
  std::vector<NewPoint> points;
  points.reserve(static_cast<std::size_t>(test.n(0)));
  for (Eigen::Index i = 0; i < test.n(0); ++i) {
    NewPoint pt;
    pt.u1 = test.comp[0].U.row(i).transpose();
    pt.u2 = test.comp[1].U.row(i).transpose();
    pt.x1 = test.comp[0].X.row(i).transpose();
    pt.x2 = test.comp[1].X.row(i).transpose();
    pt.log_exposure1 = test.comp[0].log_exposure(i);
    pt.log_exposure2 = test.comp[1].log_exposure(i);
    points.push_back(std::move(pt));
  }
  return points;
}

MCGPHyperparams scenario_theta(const ScenarioOptions& options, Eigen::Index p) {
  MCGPHyperparams theta;
  theta.shared_family = CovFamily::SquaredExponential;
  theta.xi1 = KernelParams::isotropic(options.amplitude, options.precision, p,
                                      CovFamily::SquaredExponential);
  theta.xi2 = theta.xi1;
  theta.eta1 = {CovFamily::SquaredExponential, theta.xi1};
  theta.eta2 = {CovFamily::GammaExponential,
                KernelParams::isotropic(options.amplitude, options.precision, p,
                                        CovFamily::GammaExponential)};
  theta.eta2.params.shape = options.gamma;
  theta.validate();
  return theta;
}

Vector even_grid(double lo, double hi, Eigen::Index n) {
  if (n < 1) throw DimensionError("grid needs at least one point");
  if (n == 1) return Vector::Constant(1, 0.5 * (lo + hi));
  return Vector::LinSpaced(n, lo, hi);
}

Vector cell_center_grid(double lo, double hi, Eigen::Index n) {
  if (n < 1) throw DimensionError("grid needs at least one point");
  Vector g(n);
  const double h = (hi - lo) / static_cast<double>(n);
  for (Eigen::Index i = 0; i < n; ++i) g(i) = lo + (static_cast<double>(i) + 0.5) * h;
  return g;
}

ScenarioDraw gen_scenario1(Eigen::Index n1, Eigen::Index n2, std::uint64_t seed,
                           const ScenarioOptions& options) {
  if (n1 < 1 || n2 < 1) throw DimensionError("each component needs at least one point");
  const MCGPHyperparams theta = scenario_theta(options, 1);
  const double lo = -5.0, hi = 5.0;
  const Vector x[2] = {even_grid(lo, hi, n1), even_grid(lo, hi, n2)};
  const Vector xt = cell_center_grid(lo, hi, options.n_test);

  auto [tau_train, tau_test] =
      joint_latent(column(x[0]), column(x[1]), column(xt), column(xt), theta,
                   options.zero_latent, derive_seed(seed, 1));

  ScenarioDraw draw;
  RegressionCoefficients beta{Eigen::Vector2d(1.0, 2.0), Eigen::Vector2d(1.0, 2.0)};
  draw.beta_true = beta;
  auto design = [&](const Vector& g) {
    Matrix U(g.size(), 2);
    U.col(0).setOnes();
    U.col(1) = options.mean_input_scale * g;
    return U;
  };

  draw.mu_train.resize(n1 + n2);
  draw.mu_test.resize(2 * xt.size());
  Eigen::Index off_tr = 0, off_te = 0;
  for (int a = 0; a < 2; ++a) {
    const Matrix U = design(x[a]);
    const Matrix Ut = design(xt);
    const Eigen::Index n = x[a].size(), m = xt.size();
    draw.mu_train.segment(off_tr, n) =
        (U * beta[a] + tau_train.segment(off_tr, n)).array().exp().matrix();
    draw.mu_test.segment(off_te, m) =
        (Ut * beta[a] + tau_test.segment(off_te, m)).array().exp().matrix();
    fill_component(draw.train, a, U, column(x[a]),
                   draw_counts(draw.mu_train.segment(off_tr, n), derive_seed(seed, 10 + a)));
    fill_component(draw.test, a, Ut, column(xt),
                   draw_counts(draw.mu_test.segment(off_te, m), derive_seed(seed, 20 + a)));
    off_tr += n;
    off_te += m;
  }
  return draw;
}

ScenarioDraw gen_scenario2(Eigen::Index n1, Eigen::Index n2, std::uint64_t seed,
                           const ScenarioOptions& options) {
  if (n1 < 1 || n2 < 1) throw DimensionError("each component needs at least one point");
  const MCGPHyperparams theta = scenario_theta(options, 2);

  // Each input coordinate on its own grid; the second coordinate is shuffled
  // (seeded by the size only, so equal sizes give identical paired inputs)
  // to keep the mean design (1, x1, x2) of full rank.
  auto inputs = [](Eigen::Index n, bool test) {
    Matrix X(n, 2);
    X.col(0) = test ? cell_center_grid(-5.0, 10.0, n) : even_grid(-5.0, 10.0, n);
    const Vector second = test ? cell_center_grid(1.0, 2.0, n) : even_grid(1.0, 2.0, n);
    X.col(1) = permuted(second, derive_seed(static_cast<std::uint64_t>(n), test ? 2 : 1));
    return X;
  };
  const Matrix X[2] = {inputs(n1, false), inputs(n2, false)};
  const Matrix Xt = inputs(options.n_test, true);

  auto [tau_train, tau_test] = joint_latent(X[0], X[1], Xt, Xt, theta, options.zero_latent,
                                            derive_seed(seed, 1));

  auto signal = [](int a, const Matrix& Xa) {
    Vector f(Xa.rows());
    for (Eigen::Index i = 0; i < Xa.rows(); ++i) {
      const double s = Xa(i, 0), t = Xa(i, 1);
      f(i) = a == 0 ? 0.2 * s * std::cbrt(std::abs(s)) + std::log(t)
                    : std::sin(t) + 0.4 * t * std::pow(std::abs(s), 0.25);
    }
    return f;
  };
  auto design = [](const Matrix& Xa) {
    Matrix U(Xa.rows(), 3);
    U.col(0).setOnes();
    U.rightCols(2) = Xa;
    return U;
  };

  ScenarioDraw draw;
  draw.mu_train.resize(n1 + n2);
  draw.mu_test.resize(2 * Xt.rows());
  Eigen::Index off_tr = 0, off_te = 0;
  for (int a = 0; a < 2; ++a) {
    const Eigen::Index n = X[a].rows(), m = Xt.rows();
    draw.mu_train.segment(off_tr, n) =
        (signal(a, X[a]) + tau_train.segment(off_tr, n)).array().exp().matrix();
    draw.mu_test.segment(off_te, m) =
        (signal(a, Xt) + tau_test.segment(off_te, m)).array().exp().matrix();
    fill_component(draw.train, a, design(X[a]), X[a],
                   draw_counts(draw.mu_train.segment(off_tr, n), derive_seed(seed, 10 + a)));
    fill_component(draw.test, a, design(Xt), Xt,
                   draw_counts(draw.mu_test.segment(off_te, m), derive_seed(seed, 20 + a)));
    off_tr += n;
    off_te += m;
  }
  return draw;
}

double rmse(const Vector& truth, const Vector& estimate) {
  if (truth.size() != estimate.size() || truth.size() == 0)
    throw DimensionError("rmse needs two nonempty vectors of equal length");
  return std::sqrt((truth - estimate).squaredNorm() / static_cast<double>(truth.size()));
}

double error_rate(const Vector& z_true, const Vector& z_hat) {
  if (z_true.size() != z_hat.size() || z_true.size() == 0)
    throw DimensionError("error_rate needs two nonempty vectors of equal length");
  return ((z_true - z_hat).array().abs() / (1.0 + z_true.array())).mean();
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(master) ^ (stream * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL));
}

std::vector<ModelConfig> comparison_models() {
  using F = CovFamily;
  return {
      {"model1", ModelSpec::mcgpp(F::SquaredExponential, F::SquaredExponential,
                                  F::GammaExponential)},
      {"model2", ModelSpec::mcgpp(F::RationalQuadratic, F::RationalQuadratic,
                                  F::RationalQuadratic)},
      {"model3", ModelSpec::mcgpp(F::Matern, F::Matern, F::Matern)},
      {"model4", ModelSpec::mcgpp(F::SquaredExponential, F::SquaredExponential,
                                  F::SquaredExponential)},
      {"cdr", ModelSpec::cdr()},
      {"indep", ModelSpec::indep()},
  };
}

void ScenarioConfig::validate() const {
  if (n1 < 2 || n2 < 2) throw InvalidParameter("scenario sizes must be at least 2");
  if (n_replications < 1) throw InvalidParameter("n_replications must be at least 1");
  if (models.empty()) throw InvalidParameter("no models to run");
  if (generator.n_test < 1) throw InvalidParameter("n_test must be at least 1");
  if (!(generator.amplitude > 0.0) || !(generator.precision > 0.0))
    throw InvalidParameter("generator amplitude and precision must be positive");
}

const ResultRow* ResultsTable::find(const std::string& model, const std::string& metric) const {
  for (const auto& r : rows)
    if (r.model == model && r.metric == metric) return &r;
  return nullptr;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

struct Accumulator {
  std::vector<double> values;
  ResultRow summarize(const std::string& model, const std::string& metric, int n_failed) const {
    ResultRow row{model, metric, std::numeric_limits<double>::quiet_NaN(),
                  std::numeric_limits<double>::quiet_NaN(), static_cast<int>(values.size()),
                  n_failed};
    if (values.empty()) return row;
    const double n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    row.mean = mean;
    row.std_err = values.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
    return row;
  }
};

}  // namespace

std::string ResultsTable::to_csv() const {
  std::ostringstream out;
  out << "model,metric,mean,std_err,n_ok,n_failed\n";
  for (const auto& r : rows)
    out << r.model << ',' << r.metric << ',' << fmt(r.mean) << ',' << fmt(r.std_err) << ','
        << r.n_ok << ',' << r.n_failed << '\n';
  return out.str();
}

std::string ResultsTable::plot_data_csv() const {
  std::ostringstream out;
  out << "model,replication,ok,rmse_mu,loglik\n";
  for (const auto& r : records)
    out << r.model << ',' << r.replication << ',' << (r.ok ? 1 : 0) << ','
        << fmt(r.ok ? r.rmse_mu : std::numeric_limits<double>::quiet_NaN()) << ','
        << fmt(r.ok ? r.loglik : std::numeric_limits<double>::quiet_NaN()) << '\n';
  return out.str();
}

ResultsTable run_replications(const ScenarioConfig& config) {
  config.validate();
  const std::size_t n_models = config.models.size();
  const std::size_t n_reps = static_cast<std::size_t>(config.n_replications);
  std::vector<ReplicationRecord> records(n_models * n_reps);

  auto run_one = [&](std::size_t item) {
    const std::size_t rep = item / n_models, m = item % n_models;
    ReplicationRecord& rec = records[item];
    rec.replication = static_cast<int>(rep);
    rec.model = config.models[m].name;
    const std::uint64_t rep_seed = derive_seed(config.seed, rep);
    try {
      const ScenarioDraw draw =
          config.scenario == Scenario::One
              ? gen_scenario1(config.n1, config.n2, rep_seed, config.generator)
              : gen_scenario2(config.n1, config.n2, rep_seed, config.generator);
      OptimOptions opts = config.optim;
      opts.seed = derive_seed(rep_seed, 1000 + m);
      const FittedModel model = fit(draw.train, config.models[m].spec, opts);
      const auto points = draw.test_points();
      const auto preds = predict_batch(model, draw.train, points);
      const Eigen::Index nt = static_cast<Eigen::Index>(points.size());
      Vector mu_hat(2 * nt);
      for (Eigen::Index i = 0; i < nt; ++i) {
        mu_hat(i) = preds[static_cast<std::size_t>(i)].mean(0);
        mu_hat(nt + i) = preds[static_cast<std::size_t>(i)].mean(1);
      }
      rec.rmse_mu = rmse(draw.mu_test, mu_hat);
      rec.loglik = model.loglik;
      rec.beta_hat.resize(model.beta.beta1.size() + model.beta.beta2.size());
      rec.beta_hat << model.beta.beta1, model.beta.beta2;
      rec.ok = std::isfinite(rec.rmse_mu);
      if (!rec.ok) rec.error = "non-finite prediction";
    } catch (const std::exception& e) {
      rec.ok = false;
      rec.error = e.what();
    }
  };

  const std::size_t total = records.size();
  unsigned threads = config.threads ? config.threads : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(total)));
  if (threads == 1) {
    for (std::size_t i = 0; i < total; ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < total; i = next++) run_one(i);
      });
    for (auto& th : pool) th.join();
  }

  ResultsTable table;
  table.records = std::move(records);
  std::optional<RegressionCoefficients> beta_true;
  if (config.scenario == Scenario::One)
    beta_true = RegressionCoefficients{Eigen::Vector2d(1.0, 2.0), Eigen::Vector2d(1.0, 2.0)};

  for (std::size_t m = 0; m < n_models; ++m) {
    const std::string& name = config.models[m].name;
    Accumulator mu;
    std::map<std::string, Accumulator> sq_err, abs_err;
    int failed = 0;
    for (std::size_t rep = 0; rep < n_reps; ++rep) {
      const auto& rec = table.records[rep * n_models + m];
      if (!rec.ok) {
        ++failed;
        continue;
      }
      mu.values.push_back(rec.rmse_mu);
      if (beta_true) {
        const Vector truth = (Vector(4) << beta_true->beta1, beta_true->beta2).finished();
        for (int a = 0; a < 2; ++a)
          for (int k = 0; k < 2; ++k) {
            const std::string key = std::to_string(a + 1) + "_" + std::to_string(k);
            const double err = rec.beta_hat(2 * a + k) - truth(2 * a + k);
            sq_err[key].values.push_back(err * err);
            abs_err[key].values.push_back(err);
          }
      }
    }
    table.rows.push_back(mu.summarize(name, "rmse_mu", failed));
    if (!beta_true) continue;
    for (int a = 0; a < 2; ++a)
      for (int k = 0; k < 2; ++k) {
        const std::string key = std::to_string(a + 1) + "_" + std::to_string(k);
        // RMSE = sqrt(mean squared error); its standard error by the delta method.
        ResultRow r = sq_err[key].summarize(name, "rmse_beta" + key, failed);
        if (r.n_ok > 0) {
          const double root = std::sqrt(r.mean);
          r.std_err = root > 0.0 ? r.std_err / (2.0 * root) : 0.0;
          r.mean = root;
        }
        table.rows.push_back(r);
        ResultRow b = abs_err[key].summarize(name, "abs_bias_beta" + key, failed);
        if (b.n_ok > 0) b.mean = std::abs(b.mean);
        table.rows.push_back(b);
      }
  }
  return table;
}

}  // namespace mcgpp
