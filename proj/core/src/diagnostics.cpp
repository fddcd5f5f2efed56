#include "mcgpp/diagnostics.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "mcgpp/errors.hpp"

namespace mcgpp {

double regret_term(const Matrix& K, double delta) {
  if (!(delta > 0.0)) throw InvalidParameter("regret_term: delta must be positive");
  if (K.rows() != K.cols()) throw DimensionError("regret_term: K must be square");
  Matrix B = delta * K;
  B.diagonal().array() += 1.0;
  Eigen::LLT<Matrix> llt(B);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("regret_term: I + delta K is not PD");
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

double rkhs_norm(const Vector& alpha, const Matrix& K) {
  if (K.rows() != K.cols() || K.rows() != alpha.size())
    throw DimensionError("rkhs_norm: alpha and K sizes differ");
  return std::max(0.0, alpha.dot(K * alpha));
}

std::string RegretCurve::to_csv() const {
  std::ostringstream out;
  out << "n,regret,regret_over_n\n";
  char buf[96];
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%lld,%.10g,%.10g\n", static_cast<long long>(sizes[i]),
                  regret[i], regret[i] / static_cast<double>(sizes[i]));
    out << buf;
  }
  return out.str();
}

MCGPHyperparams uniform_family_theta(CovFamily family, double amplitude, double precision,
                                     Eigen::Index p) {
  MCGPHyperparams theta;
  theta.shared_family = family;
  theta.xi1 = KernelParams::isotropic(amplitude, precision, p, family);
  theta.xi2 = theta.xi1;
  theta.eta1 = {family, theta.xi1};
  theta.eta2 = {family, theta.xi1};
  theta.validate();
  return theta;
}

RegretCurve regret_growth(const MCGPHyperparams& theta, const std::vector<Eigen::Index>& sizes,
                          double delta, std::uint64_t seed, int draws, double lo, double hi) {
  if (draws < 1) throw InvalidParameter("regret_growth: draws must be positive");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 2) throw InvalidParameter("regret_growth: sizes must be at least 2");
    if (i > 0 && sizes[i] <= sizes[i - 1])
      throw InvalidParameter("regret_growth: sizes must be strictly increasing");
  }
  theta.validate();
  const Eigen::Index p = theta.dim();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(lo, hi);
  auto draw_inputs = [&](Eigen::Index n) {
    Matrix X(n, p);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < p; ++j) X(i, j) = unif(rng);
    return X;
  };

  RegretCurve curve;
  curve.delta = delta;
  for (const Eigen::Index n : sizes) {
    double sum = 0.0;
    for (int d = 0; d < draws; ++d) {
      StackedInputs inputs{draw_inputs(n / 2), draw_inputs(n - n / 2)};
      sum += regret_term(assemble_K(inputs, theta), delta);
    }
    curve.sizes.push_back(n);
    curve.regret.push_back(sum / draws);
  }
  return curve;
}

std::vector<Eigen::Index> log_spaced_sizes(Eigen::Index first, Eigen::Index last, int count) {
  if (count < 1 || first < 1 || last < first)
    throw InvalidParameter("log_spaced_sizes: need 1 <= first <= last and count >= 1");
  std::vector<Eigen::Index> sizes;
  const double a = std::log(static_cast<double>(first));
  const double b = std::log(static_cast<double>(last));
  for (int i = 0; i < count; ++i) {
    const double t = count == 1 ? 1.0 : static_cast<double>(i) / (count - 1);
    auto n = static_cast<Eigen::Index>(std::llround(std::exp(a + t * (b - a))));
    if (!sizes.empty() && n <= sizes.back()) n = sizes.back() + 1;
    sizes.push_back(n);
  }
  return sizes;
}

PdAudit pd_audit(const Matrix& K, double relative_jitter) {
  if (K.rows() != K.cols()) throw DimensionError("pd_audit: K must be square");
  PdAudit audit;
  audit.size = K.rows();
  if (K.size() == 0) {
    audit.cholesky_raw = audit.cholesky_jittered = true;
    return audit;
  }
  audit.asymmetry = (K - K.transpose()).cwiseAbs().maxCoeff();
  const Matrix sym = 0.5 * (K + K.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
  audit.min_eigenvalue = eig.eigenvalues().minCoeff();
  audit.max_eigenvalue = eig.eigenvalues().maxCoeff();
  audit.norm = eig.eigenvalues().cwiseAbs().maxCoeff();
  audit.cholesky_raw = Eigen::LLT<Matrix>(K).info() == Eigen::Success;
  double mean_diag = K.diagonal().mean();
  if (!(mean_diag > 0.0)) mean_diag = 1.0;
  Matrix J = K;
  J.diagonal().array() += relative_jitter * mean_diag;
  audit.cholesky_jittered = Eigen::LLT<Matrix>(J).info() == Eigen::Success;
  return audit;
}

std::string PdAudit::report() const {
  std::ostringstream out;
  out.precision(10);
  out << "size " << size << "\n"
      << "min_eigenvalue " << min_eigenvalue << "\n"
      << "max_eigenvalue " << max_eigenvalue << "\n"
      << "relative_min_eigenvalue " << relative_min_eigenvalue() << "\n"
      << "asymmetry " << asymmetry << "\n"
      << "cholesky_raw " << (cholesky_raw ? "ok" : "failed") << "\n"
      << "cholesky_jittered " << (cholesky_jittered ? "ok" : "failed") << "\n";
  return out.str();
}

}  // namespace mcgpp
