#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mcgpp/covariance.hpp"

namespace mcgpp {

/// log|I + delta K| by Cholesky. Throws NotPositiveDefinite if the factorization fails.
double regret_term(const Matrix& K, double delta);

/// alpha' K alpha, the squared RKHS norm of K alpha.
double rkhs_norm(const Vector& alpha, const Matrix& K);

struct RegretCurve {
  std::vector<Eigen::Index> sizes;
  std::vector<double> regret;
  double delta = 1.0;

  /// Header: n,regret,regret_over_n
  std::string to_csv() const;
};

/// Every process of the same family, isotropic A = precision * I_p, default shapes.
MCGPHyperparams uniform_family_theta(CovFamily family, double amplitude = 1.0,
                                     double precision = 1.0, Eigen::Index p = 1);

/// Mean regret log|I + delta K_n| over `draws` input sets per size. Inputs are
/// uniform on [lo, hi]^p, split n/2 to the first component and the rest to
/// the second.
RegretCurve regret_growth(const MCGPHyperparams& theta, const std::vector<Eigen::Index>& sizes,
                          double delta, std::uint64_t seed, int draws = 20, double lo = -5.0,
                          double hi = 5.0);

/// `count` sizes spaced evenly in log from `first` to `last`, rounded and strictly increasing.
std::vector<Eigen::Index> log_spaced_sizes(Eigen::Index first, Eigen::Index last, int count);

struct PdAudit {
  Eigen::Index size = 0;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  double norm = 0.0;              ///< spectral norm
  double asymmetry = 0.0;         ///< max |K - K'|
  bool cholesky_raw = false;      ///< K factors without jitter
  bool cholesky_jittered = false; ///< K + relative_jitter * mean(diag) I factors

  double relative_min_eigenvalue() const { return norm > 0.0 ? min_eigenvalue / norm : 0.0; }
  std::string report() const;
};

PdAudit pd_audit(const Matrix& K, double relative_jitter = 1e-6);

}  // namespace mcgpp
