// Acceptance suite: one PASS/FAIL line per criterion.
//
//   mcgpp_acceptance [criteria...] [--documented-fail=1,2,...]
//
// With no criteria every one is run. A criterion listed in --documented-fail
// still prints FAIL when it fails, but does not make the exit status nonzero;
// the analysis for each such entry lives with the project decisions.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mcgpp/diagnostics.hpp"
#include "mcgpp/errors.hpp"
#include "mcgpp/likelihood.hpp"
#include "mcgpp/prediction.hpp"
#include "mcgpp/simulation.hpp"
#include "oracles.hpp"

using namespace mcgpp;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

const CovFamily kFamilies[] = {CovFamily::SquaredExponential, CovFamily::Matern,
                               CovFamily::GammaExponential, CovFamily::RationalQuadratic};

KernelParams random_kernel(CovFamily f, Eigen::Index p, std::mt19937_64& rng, double vlo = 0.1,
                           double vhi = 2.0) {
  std::uniform_real_distribution<double> V(vlo, vhi), A(0.05, 3.0), G(0.1, 2.0), S(0.3, 5.0);
  std::normal_distribution<double> N;
  KernelParams k;
  k.v = V(rng);
  Matrix M(p, p);
  for (Eigen::Index i = 0; i < M.size(); ++i) M.data()[i] = 0.5 * N(rng);
  k.A = M * M.transpose() + A(rng) * Matrix::Identity(p, p);
  if (f == CovFamily::GammaExponential) k.shape = G(rng);
  else if (has_shape(f)) k.shape = S(rng);
  return k;
}

MCGPHyperparams random_theta(Eigen::Index p, std::mt19937_64& rng, bool mixed) {
  std::uniform_int_distribution<int> pick(0, 3);
  MCGPHyperparams t;
  t.shared_family = kFamilies[pick(rng)];
  const CovFamily f1 = mixed ? kFamilies[pick(rng)] : t.shared_family;
  const CovFamily f2 = mixed ? kFamilies[pick(rng)] : t.shared_family;
  t.xi1 = random_kernel(t.shared_family, p, rng);
  t.xi2 = random_kernel(t.shared_family, p, rng);
  t.xi2.shape = t.xi1.shape;
  t.eta1 = {f1, random_kernel(f1, p, rng)};
  t.eta2 = {f2, random_kernel(f2, p, rng)};
  return t;
}

Matrix random_points(Eigen::Index n, Eigen::Index p, std::mt19937_64& rng, double lo = -5.0,
                     double hi = 5.0) {
  std::uniform_real_distribution<double> U(lo, hi);
  Matrix X(n, p);
  for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = U(rng);
  return X;
}

// Scenario tables are shared by criteria 1 and 2.
std::map<int, ResultsTable> g_tables;
std::map<int, double> g_runtime;

const ResultsTable& scenario_table(int scenario) {
  auto it = g_tables.find(scenario);
  if (it != g_tables.end()) return it->second;
  ScenarioConfig cfg;
  cfg.scenario = scenario == 1 ? Scenario::One : Scenario::Two;
  cfg.n1 = cfg.n2 = 20;
  cfg.n_replications = 30;
  cfg.seed = 2024;
  const auto t0 = Clock::now();
  ResultsTable table = run_replications(cfg);
  g_runtime[scenario] = seconds_since(t0);
  std::printf("# scenario %d results (%d replications, %.1f s)\n", scenario, cfg.n_replications,
              g_runtime[scenario]);
  std::istringstream csv(table.to_csv());
  for (std::string line; std::getline(csv, line);) std::printf("#   %s\n", line.c_str());
  std::fflush(stdout);
  return g_tables.emplace(scenario, std::move(table)).first->second;
}

double metric(const ResultsTable& t, const std::string& model, const std::string& name) {
  const ResultRow* r = t.find(model, name);
  return r ? r->mean : std::nan("");
}

const char* kMcgppModels[] = {"model1", "model2", "model3", "model4"};

Verdict criterion1() {
  const ResultsTable& t = scenario_table(1);
  const double m1 = metric(t, "model1", "rmse_mu");
  const double indep = metric(t, "indep", "rmse_mu");
  const double cdr = metric(t, "cdr", "rmse_mu");
  bool ok = true;
  std::ostringstream d;
  for (int k = 1; k < 4; ++k) ok &= m1 <= metric(t, kMcgppModels[k], "rmse_mu");
  for (const char* m : kMcgppModels) ok &= metric(t, m, "rmse_mu") < indep;
  ok &= indep < cdr;
  const bool in_range = m1 >= 0.013 && m1 <= 0.055;
  const bool fast = g_runtime[1] <= 1200.0;
  d << "ordering " << (ok ? "holds" : "violated") << "; model1 " << fmt("%.5g", m1)
    << (in_range ? " in" : " outside") << " [0.013, 0.055]; models 2-4 "
    << fmt("%.5g", metric(t, "model2", "rmse_mu")) << " " << fmt("%.5g", metric(t, "model3", "rmse_mu"))
    << " " << fmt("%.5g", metric(t, "model4", "rmse_mu")) << "; indep " << fmt("%.5g", indep)
    << "; cdr " << fmt("%.5g", cdr) << "; runtime " << fmt("%.0f", g_runtime[1]) << " s";
  return {ok && in_range && fast, d.str()};
}

Verdict criterion2() {
  const ResultsTable& t = scenario_table(1);
  const char* coefs[] = {"1_0", "1_1", "2_0", "2_1"};
  bool ok = true;
  std::ostringstream d;
  for (const char* c : coefs) {
    const std::string r = std::string("rmse_beta") + c, b = std::string("abs_bias_beta") + c;
    double worst = 0.0, worst_bias = 0.0;
    for (const char* m : kMcgppModels) {
      worst = std::max(worst, metric(t, m, r));
      worst_bias = std::max(worst_bias, metric(t, m, b));
    }
    const double cdr = metric(t, "cdr", r), indep = metric(t, "indep", r);
    const bool this_ok = worst < 0.08 && worst_bias < 0.02 && cdr > worst && indep > worst;
    ok &= this_ok;
    d << "beta" << c << ": worst model1-4 rmse " << fmt("%.4f", worst) << " |bias| "
      << fmt("%.4f", worst_bias) << ", cdr " << fmt("%.4f", cdr) << ", indep "
      << fmt("%.4f", indep) << (this_ok ? "" : " (fails)") << "; ";
  }
  return {ok, d.str()};
}

Verdict criterion3() {
  const ResultsTable& t = scenario_table(2);
  const double cdr = metric(t, "cdr", "rmse_mu");
  const double m1 = metric(t, "model1", "rmse_mu");
  bool below = true;
  std::ostringstream d;
  for (const char* m : kMcgppModels) {
    const double v = metric(t, m, "rmse_mu");
    below &= v < cdr;
    d << m << " " << fmt("%.5g", v) << "; ";
  }
  const bool in_range = m1 >= 0.010 && m1 <= 0.040;
  d << "cdr " << fmt("%.5g", cdr) << "; indep " << fmt("%.5g", metric(t, "indep", "rmse_mu"))
    << "; models 1-4 below cdr: " << (below ? "yes" : "no") << "; model1 in [0.010, 0.040]: "
    << (in_range ? "yes" : "no");
  return {below && in_range, d.str()};
}

Verdict criterion4() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> B(-0.5, 2.0);
  int good = 0;
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    MCGPHyperparams theta = random_theta(1, rng, true);
    for (KernelParams* kp : {&theta.xi1, &theta.xi2, &theta.eta1.params, &theta.eta2.params})
      kp->v = std::uniform_real_distribution<double>(0.2, 0.9)(rng);
    Dataset d;
    const RegressionCoefficients beta{Vector::Constant(1, B(rng)), Vector::Constant(1, B(rng))};
    const Matrix X1 = random_points(1, 1, rng), X2 = random_points(1, 1, rng);
    const Matrix K = assemble_K({X1, X2}, theta);
    const Vector tau = sample_gaussian(K, 1000 + k);
    Vector z(2);
    for (int a = 0; a < 2; ++a)
      z(a) = std::poisson_distribution<int>(std::exp(beta[a](0) + tau(a)))(rng);
    d.comp[0] = Dataset::make_component(z.head(1), Matrix::Ones(1, 1), X1);
    d.comp[1] = Dataset::make_component(z.tail(1), Matrix::Ones(1, 1), X2);
    const double laplace = laplace_marginal_loglik(beta, theta, d);
    const double exact = oracle::log_integral_2d({K, linear_predictor(d, beta), z, {}});
    const double err = std::abs(laplace - exact);
    worst = std::max(worst, err);
    good += err < 0.1;
  }
  const double secs = seconds_since(t0);
  return {good >= 48 && secs < 60.0,
          std::to_string(good) + "/50 within 0.1 nats (worst " + fmt("%.4f", worst) + "); " +
              fmt("%.1f", secs) + " s"};
}

Verdict criterion5() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(505);
  int ok = 0;
  double worst_mean = 0, worst_var = 0, worst_cross = 0;
  for (int k = 0; k < 10; ++k) {
    const Eigen::Index n = 1 + k % 3;
    MCGPHyperparams theta;
    theta.xi1 = KernelParams::isotropic(0.6, 0.5);
    theta.xi2 = KernelParams::isotropic(0.5, 0.7);
    theta.eta1 = {CovFamily::SquaredExponential, KernelParams::isotropic(0.25, 0.5)};
    theta.eta2 = {CovFamily::GammaExponential,
                  KernelParams::isotropic(0.25, 0.5, 1, CovFamily::GammaExponential)};
    const Matrix X1 = random_points(n, 1, rng, -2, 2), X2 = random_points(n, 1, rng, -2, 2);
    const RegressionCoefficients beta{Vector::Constant(1, 1.2), Vector::Constant(1, 0.8)};
    const Matrix K = assemble_K({X1, X2}, theta);
    const Vector tau = sample_gaussian(K, 5000 + k);
    Dataset d;
    Vector z(2 * n);
    for (Eigen::Index i = 0; i < 2 * n; ++i)
      z(i) = std::poisson_distribution<int>(std::exp((i < n ? 1.2 : 0.8) + tau(i)))(rng);
    d.comp[0] = Dataset::make_component(z.head(n), Matrix::Ones(n, 1), X1);
    d.comp[1] = Dataset::make_component(z.tail(n), Matrix::Ones(n, 1), X2);

    FittedModel model;
    model.spec = ModelSpec::mcgpp(theta.shared_family, theta.eta1.family, theta.eta2.family);
    model.theta = theta;
    model.beta = beta;
    const double xs = std::uniform_real_distribution<double>(-3, 3)(rng);
    const NewPoint pt{Vector::Ones(1), Vector::Ones(1), Vector::Constant(1, xs),
                      Vector::Constant(1, xs + 0.3), 0.0, 0.0};
    const PredictionResult r = predict(model, d, pt);

    const Matrix Kp = make_covariance(theta)->stacked_plus(d.inputs(), pt.x1, pt.x2);
    oracle::LogTarget post{Kp, Vector::Zero(2 * n + 2), d.stacked_counts(), {}};
    post.offset.head(2 * n) = linear_predictor(d, beta);
    const oracle::ImportanceSampler is(post);
    const auto mo = is.run(Eigen::Vector2d(1.2, 0.8), 1000000, 600 + k);
    const double e_mean = std::max(std::abs(r.mean(0) / mo.m1 - 1), std::abs(r.mean(1) / mo.m2 - 1));
    const double e_var = std::max(std::abs(r.var(0, 0) / (mo.m1 + mo.s1 - mo.m1 * mo.m1) - 1),
                                  std::abs(r.var(1, 1) / (mo.m2 + mo.s2 - mo.m2 * mo.m2) - 1));
    const double e_cross = std::abs(r.var(0, 1) / (mo.c12 - mo.m1 * mo.m2) - 1);
    worst_mean = std::max(worst_mean, e_mean);
    worst_var = std::max(worst_var, e_var);
    worst_cross = std::max(worst_cross, e_cross);
    ok += e_mean < 0.02 && e_var < 0.05 && e_cross < 0.10;
  }
  const double secs = seconds_since(t0);
  return {ok == 10 && secs < 300.0,
          std::to_string(ok) + "/10 instances within tolerance; worst relative errors mean " +
              fmt("%.4f", worst_mean) + ", var " + fmt("%.4f", worst_var) + ", cross " +
              fmt("%.4f", worst_cross) + "; " + fmt("%.1f", secs) + " s"};
}

Verdict criterion6() {
  std::mt19937_64 rng(606);
  std::uniform_int_distribution<int> size(2, 15), dim(1, 3);
  int chol_ok = 0, eig_ok = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 1000; ++k) {
    const Eigen::Index p = dim(rng);
    const MCGPHyperparams theta = random_theta(p, rng, k % 2 == 1);
    const Matrix K =
        assemble_K({random_points(size(rng), p, rng), random_points(size(rng), p, rng)}, theta);
    const PdAudit a = pd_audit(K, 1e-6);
    chol_ok += a.cholesky_jittered;
    eig_ok += a.min_eigenvalue >= -1e-8 * a.norm;
    worst = std::min(worst, a.relative_min_eigenvalue());
  }
  return {chol_ok == 1000 && eig_ok >= 990,
          "jittered Cholesky " + std::to_string(chol_ok) + "/1000; min eigenvalue >= -1e-8 |K| in " +
              std::to_string(eig_ok) + "/1000 (worst relative " + fmt("%.3g", worst) + ")"};
}

Verdict criterion7() {
  std::mt19937_64 rng(707);
  std::uniform_int_distribution<int> size(1, 6);
  std::normal_distribution<double> N;
  int ok = 0;
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const MCGPHyperparams theta = random_theta(1, rng, true);
    const Eigen::Index n1 = size(rng), n2 = size(rng);
    const Matrix X1 = random_points(n1, 1, rng), X2 = random_points(n2, 1, rng);
    Dataset d;
    Vector z(n1 + n2);
    for (auto& v : z) v = std::poisson_distribution<int>(3.0)(rng);
    d.comp[0] = Dataset::make_component(z.head(n1), Matrix::Ones(n1, 1), X1);
    d.comp[1] = Dataset::make_component(z.tail(n2), Matrix::Ones(n2, 1), X2);
    const RegressionCoefficients beta{Vector::Constant(1, 0.5 * N(rng)),
                                      Vector::Constant(1, 0.5 * N(rng))};
    Matrix K = assemble_K({X1, X2}, theta);
    K.diagonal().array() += 0.05 * K.diagonal().mean();  // keep K^{-1} well conditioned
    const CholeskyFactor f = chol_psd(K);
    Vector tau(n1 + n2);
    for (auto& t : tau) t = 0.5 * N(rng);
    const Vector g = phi_grad_W(tau, d, beta, f).gradient;
    Vector fd(tau.size());
    const double h = 1e-5;
    for (Eigen::Index i = 0; i < tau.size(); ++i) {
      Vector up = tau, dn = tau;
      up(i) += h;
      dn(i) -= h;
      fd(i) = (phi(up, d, beta, f) - phi(dn, d, beta, f)) / (2 * h);
    }
    const double rel = (g - fd).norm() / std::max(1.0, fd.norm());
    worst = std::max(worst, rel);
    ok += rel < 1e-5;
  }
  return {ok == 100, std::to_string(ok) + "/100 within 1e-5 (worst " + fmt("%.2e", worst) + ")"};
}

Verdict criterion8() {
  std::mt19937_64 rng(808);
  std::normal_distribution<double> N;
  int mismatches = 0;
  for (CovFamily f : kFamilies) {
    for (int k = 0; k < 1000; ++k) {
      const Eigen::Index p = 1 + k % 3;
      KernelParams a = random_kernel(f, p, rng), b = random_kernel(f, p, rng);
      b.shape = a.shape;
      const auto ab = PreparedKernel::cross(f, a, b), ba = PreparedKernel::cross(f, b, a);
      Vector dvec(p);
      for (auto& x : dvec) x = 2.0 * N(rng);
      const Vector neg = -dvec;
      mismatches += ab(dvec) != ba(neg);
    }
    // Assembled blocks: Cov(tau_1(x), tau_2(x')) equals Cov(tau_2(x'), tau_1(x)).
    MCGPHyperparams t = random_theta(2, rng, true);
    t.shared_family = f;
    t.xi1 = random_kernel(f, 2, rng);
    t.xi2 = random_kernel(f, 2, rng);
    t.xi2.shape = t.xi1.shape;
    const MCGPCovariance cov(t);
    const Matrix xa = random_points(7, 2, rng), xb = random_points(5, 2, rng);
    mismatches += (cov.block(0, xa, 1, xb) != cov.block(1, xb, 0, xa).transpose());
  }
  return {mismatches == 0, std::to_string(mismatches) + " mismatches over 4 x 1000 displacements"};
}

Verdict criterion9() {
  std::mt19937_64 rng(909);
  MCGPHyperparams theta;
  theta.xi1 = KernelParams::isotropic(0.8, 1.0);
  theta.xi2 = KernelParams::isotropic(0.6, 0.5);
  theta.eta1 = {CovFamily::Matern, KernelParams::isotropic(0.5, 1.0, 1, CovFamily::Matern)};
  theta.eta2 = {CovFamily::GammaExponential,
                KernelParams::isotropic(0.5, 1.0, 1, CovFamily::GammaExponential)};
  const StackedInputs in{random_points(3, 1, rng), random_points(3, 1, rng)};
  const Matrix K = assemble_K(in, theta);
  const int N = 20000;
  Matrix S = Matrix::Zero(6, 6);
  for (int k = 0; k < N; ++k) {
    const auto [t1, t2] = sample_mcgp(in, theta, derive_seed(99, k));
    Vector s(6);
    s << t1, t2;
    S += s * s.transpose();
  }
  S /= N;
  const double rel = (S - K).norm() / K.norm();
  return {rel < 0.05, "relative Frobenius distance " + fmt("%.4f", rel)};
}

Verdict criterion10() {
  const MCGPHyperparams theta = uniform_family_theta(CovFamily::SquaredExponential);
  const auto sizes = log_spaced_sizes(10, 400, 8);
  const RegretCurve c = regret_growth(theta, sizes, 1.0, 1010, 20);
  bool decreasing = true;
  std::ostringstream d;
  for (std::size_t i = 0; i < c.sizes.size(); ++i) {
    const double r = c.regret[i] / static_cast<double>(c.sizes[i]);
    d << c.sizes[i] << ":" << fmt("%.4f", r) << " ";
    if (i >= 4) decreasing &= r < c.regret[i - 1] / static_cast<double>(c.sizes[i - 1]);
  }
  return {decreasing, "R(n)/n " + d.str()};
}

Verdict criterion11() {
  // (a) Exposure and intercept compensate. The likelihood must agree to
  // round-off (log(2E) and log E + log 2 may differ in the last bit, so the
  // bit-identical count is only reported); the Laplace marginal agrees to the
  // mode tolerance.
  std::mt19937_64 rng(1111);
  int exact = 0;
  double worst_general = 0.0, worst_marginal = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Eigen::Index n = 4;
    const Matrix X = random_points(n, 1, rng);
    Vector z(n), E(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      z(i) = std::poisson_distribution<int>(5.0)(rng);
      E(i) = std::uniform_real_distribution<double>(0.5, 3.0)(rng);
    }
    Matrix U(n, 2);
    U << Vector::Ones(n), X;
    const RegressionCoefficients ba{Eigen::Vector2d(0.7, 0.1), Eigen::Vector2d(0.3, -0.2)};
    Vector tau(2 * n);
    for (auto& t : tau) t = std::normal_distribution<double>(0, 0.3)(rng);
    Dataset a;
    a.comp[0] = a.comp[1] = Dataset::make_component(z, U, X, E);
    const double c = k == 0 ? 2.0 : std::uniform_real_distribution<double>(0.2, 5.0)(rng);
    for (double factor : {2.0, c}) {
      Dataset b;
      b.comp[0] = b.comp[1] = Dataset::make_component(z, U, X, Vector(factor * E));
      RegressionCoefficients bb = ba;
      bb.beta1(0) -= std::log(factor);
      bb.beta2(0) -= std::log(factor);
      const double la = log_likelihood(tau, a, ba), lb = log_likelihood(tau, b, bb);
      exact += la == lb;
      worst_general = std::max(worst_general, std::abs(la - lb) / (1.0 + std::abs(la)));
      if (factor != 2.0) {
        const MCGPHyperparams theta = random_theta(1, rng, true);
        worst_marginal = std::max(worst_marginal, std::abs(laplace_marginal_loglik(ba, theta, a) -
                                                           laplace_marginal_loglik(bb, theta, b)));
      }
    }
  }
  const bool offset_ok = worst_general < 1e-14 && worst_marginal < 1e-7;

  // (b) Spatial smoke test: unpaired (latitude, longitude) inputs.
  int wins = 0, failures = 0;
  MCGPHyperparams truth;
  truth.xi1 = KernelParams::isotropic(0.6, 0.4, 2);
  truth.xi2 = KernelParams::isotropic(0.6, 0.4, 2);
  truth.eta1 = {CovFamily::SquaredExponential, KernelParams::isotropic(0.15, 0.4, 2)};
  truth.eta2 = {CovFamily::SquaredExponential, KernelParams::isotropic(0.15, 0.4, 2)};
  OptimOptions opts;
  opts.n_starts = 1;
  const ModelSpec mcgpp = ModelSpec::mcgpp(CovFamily::SquaredExponential,
                                           CovFamily::SquaredExponential,
                                           CovFamily::SquaredExponential);
  for (int r = 0; r < 30; ++r) {
    std::mt19937_64 g(derive_seed(1112, r));
    auto latlong = [&](Eigen::Index n) {
      Matrix X(n, 2);
      for (Eigen::Index i = 0; i < n; ++i) {
        X(i, 0) = std::uniform_real_distribution<double>(-4, 4)(g);
        X(i, 1) = std::uniform_real_distribution<double>(-4, 4)(g);
      }
      return X;
    };
    const StackedInputs in{latlong(20), latlong(20)};
    const auto [t1, t2] = sample_mcgp(in, truth, derive_seed(1113, r));
    Dataset d;
    for (int a = 0; a < 2; ++a) {
      const Vector& t = a == 0 ? t1 : t2;
      Vector z(20);
      for (Eigen::Index i = 0; i < 20; ++i)
        z(i) = std::poisson_distribution<int>(std::exp(1.5 + t(i)))(g);
      d.comp[a] = Dataset::make_component(z, Matrix::Ones(20, 1), a == 0 ? in.x1 : in.x2);
    }
    try {
      opts.seed = derive_seed(1114, r);
      const double l_mcgpp = fit(d, mcgpp, opts).loglik;
      const double l_indep = fit(d, ModelSpec::indep(), opts).loglik;
      wins += l_mcgpp > l_indep;
    } catch (const Error&) {
      ++failures;
    }
  }
  return {offset_ok && wins >= 27,
          "likelihood relative difference " + fmt("%.1e", worst_general) + " (bit-identical in " +
              std::to_string(exact) + "/40); marginal difference "
              + fmt("%.1e", worst_marginal) + "; spatial MCGPP loglik > Indep in " +
              std::to_string(wins) + "/30 (" + std::to_string(failures) + " fit failures)"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Verdict()>> criteria{
      criterion1, criterion2, criterion3, criterion4,  criterion5, criterion6,
      criterion7, criterion8, criterion9, criterion10, criterion11};
  std::set<int> selected, documented;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    const std::string flag = "--documented-fail=";
    if (arg.rfind(flag, 0) == 0) {
      std::istringstream list(arg.substr(flag.size()));
      for (std::string item; std::getline(list, item, ',');) documented.insert(std::stoi(item));
    } else {
      selected.insert(std::stoi(arg));
    }
  }
  int unexpected = 0, passed = 0, run = 0;
  for (int c = 1; c <= static_cast<int>(criteria.size()); ++c) {
    if (!selected.empty() && !selected.count(c)) continue;
    ++run;
    Verdict v;
    const auto t0 = Clock::now();
    try {
      v = criteria[static_cast<std::size_t>(c - 1)]();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const char* status = v.pass ? "PASS" : (documented.count(c) ? "FAIL (documented)" : "FAIL");
    std::printf("criterion %2d: %s  [%.1f s] %s\n", c, status, seconds_since(t0), v.detail.c_str());
    std::fflush(stdout);
    passed += v.pass;
    if (!v.pass && !documented.count(c)) ++unexpected;
  }
  std::printf("acceptance: %d/%d criteria passed\n", passed, run);
  return unexpected == 0 ? 0 : 1;
}
