#pragma once

#include <functional>
#include <optional>
#include <string_view>

#include <Eigen/Dense>

namespace mcgpp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class CovFamily { SquaredExponential, Matern, GammaExponential, RationalQuadratic };

std::string_view to_string(CovFamily family);
CovFamily family_from_string(std::string_view name);

/// True when the family carries a shape parameter (nu, gamma or alpha).
bool has_shape(CovFamily family);

/// nu = 1.5 (Matern), gamma = 1.5 (gamma-exponential), alpha = 1.0 (rational quadratic).
double default_shape(CovFamily family);

/// Hyperparameters of one Gaussian smoothing kernel h(x) = v exp(-x'Ax/2).
///
/// `A` is the kernel precision (p x p, symmetric positive definite). `shape`
/// holds the family-specific smoothness when the process is not
/// squared-exponential: Matern nu > 0, gamma-exponential 0 < gamma <= 2,
/// rational-quadratic alpha > 0.
struct KernelParams {
  double v = 1.0;
  Matrix A = Matrix::Identity(1, 1);
  std::optional<double> shape;

  Eigen::Index dim() const { return A.rows(); }

  /// Isotropic A = a * I_p, with the family's default shape filled in.
  static KernelParams isotropic(double v, double a, Eigen::Index p = 1,
                                CovFamily family = CovFamily::SquaredExponential);

  /// Throws InvalidParameter / NotPositiveDefinite if the invariants fail.
  void validate(CovFamily family) const;
};

/// Q_ab(d) = d' A_a (A_a + A_b)^{-1} A_b d.
double quad_form(const Vector& d, const Matrix& Aa, const Matrix& Ab);

/// Squared-exponential self covariance pi^{p/2} v^2 |A|^{-1/2} exp(-d'Ad/4).
double cov_self_sqexp(const Vector& d, const KernelParams& params);

/// Cross covariance of two Gaussian-kernel CGPs driven by the same white noise.
double cov_cross_sqexp(const Vector& d, const KernelParams& pa, const KernelParams& pb);

/// Isotropic correlation S(m) of the family, S(0) = 1. The scaling is chosen
/// so that every family tends to exp(-m^2/2) in its Gaussian limit.
double correlation(CovFamily family, double m, double shape);

/// Self covariance of a CGP of the given family, normalized to the
/// squared-exponential zero-lag variance.
double cov_iso(CovFamily family, const Vector& d, const KernelParams& params);

using IsotropicCorrelation = std::function<double(double)>;

/// v_a v_b (2 pi)^{p/2} |A_a + A_b|^{-1/2} S(sqrt(Q_ab(d))).
double cov_cross_general(const IsotropicCorrelation& S, const Vector& d, const KernelParams& pa,
                         const KernelParams& pb);

/// Cross covariance between two processes of `family` sharing one white noise.
/// The shape parameter is taken from `pa`.
double cov_cross(CovFamily family, const Vector& d, const KernelParams& pa, const KernelParams& pb);

/// Covariance k(d) = scale * S(sqrt(d' metric d)) with the matrix algebra done once.
///
/// Built either for a single process (self covariance) or for an ordered pair
/// of processes sharing white noise. The pair is canonicalized internally, so
/// cross(a, b) evaluated at d and cross(b, a) at -d agree bitwise.
class PreparedKernel {
 public:
  static PreparedKernel self(CovFamily family, const KernelParams& params);
  static PreparedKernel cross(CovFamily family, const KernelParams& pa, const KernelParams& pb);

  double operator()(const Eigen::Ref<const Vector>& d) const;
  double zero_lag() const { return scale_; }
  Eigen::Index dim() const { return metric_.rows(); }

 private:
  PreparedKernel(CovFamily family, double scale, Matrix metric, double shape);

  CovFamily family_;
  double scale_;
  Matrix metric_;
  double shape_;
  bool diagonal_;
};

}  // namespace mcgpp
