#include "mcgpp/model.hpp"

#include <algorithm>
#include <cmath>

#include "mcgpp/errors.hpp"

namespace mcgpp {

namespace {

constexpr double kLogV2Lo = -20.0;
constexpr double kLogV2Hi = 8.0;
constexpr double kLogALo = -10.0;
constexpr double kLogAHi = 8.0;
constexpr double kLogSigmaLo = -20.0;
constexpr double kLogSigmaHi = 6.0;

double sigmoid(double s) {
  if (s >= 0.0) return 1.0 / (1.0 + std::exp(-s));
  const double e = std::exp(s);
  return e / (1.0 + e);
}

struct ShapeBox {
  bool log_scale;
  double lo;
  double hi;
};

ShapeBox shape_box(CovFamily family) {
  switch (family) {
    case CovFamily::Matern:
      return {true, std::log(0.2), std::log(30.0)};
    case CovFamily::GammaExponential:
      return {false, 0.05, 2.0};
    case CovFamily::RationalQuadratic:
      return {true, std::log(0.05), std::log(100.0)};
    case CovFamily::SquaredExponential:
      break;
  }
  return {false, 0.0, 0.0};
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Mcgpp:
      return "mcgpp";
    case ModelKind::Cdr:
      return "cdr";
    case ModelKind::Indep:
      return "indep";
  }
  return "unknown";
}

ModelKind model_kind_from_string(std::string_view name) {
  if (name == "mcgpp") return ModelKind::Mcgpp;
  if (name == "cdr") return ModelKind::Cdr;
  if (name == "indep") return ModelKind::Indep;
  throw InvalidParameter("unknown model '" + std::string(name) + "'");
}

ModelSpec ModelSpec::mcgpp(CovFamily shared, CovFamily eta1, CovFamily eta2) {
  ModelSpec spec;
  spec.kind = ModelKind::Mcgpp;
  spec.shared = shared;
  spec.eta1 = eta1;
  spec.eta2 = eta2;
  return spec;
}

ModelSpec ModelSpec::cdr() {
  ModelSpec spec;
  spec.kind = ModelKind::Cdr;
  return spec;
}

ModelSpec ModelSpec::indep() {
  ModelSpec spec;
  spec.kind = ModelKind::Indep;
  return spec;
}

std::unique_ptr<BivariateCovariance> make_covariance(const Hyperparams& theta) {
  return std::visit(
      [](const auto& params) -> std::unique_ptr<BivariateCovariance> {
        using T = std::decay_t<decltype(params)>;
        if constexpr (std::is_same_v<T, MCGPHyperparams>) {
          return std::make_unique<MCGPCovariance>(params);
        } else if constexpr (std::is_same_v<T, CDRHyperparams>) {
          return std::make_unique<CDRCovariance>(params);
        } else {
          return std::make_unique<IndepCovariance>(params);
        }
      },
      theta);
}

Matrix latent_covariance(const Hyperparams& theta, const StackedInputs& inputs) {
  return make_covariance(theta)->stacked(inputs);
}

ParameterMap::ParameterMap(const ModelSpec& spec, Eigen::Index q1, Eigen::Index q2, Eigen::Index p)
    : spec_(spec), q1_(q1), q2_(q2), p_(p) {
  if (q1 < 1 || q2 < 1 || p < 1) throw DimensionError("ParameterMap: empty design or inputs");
  switch (spec.kind) {
    case ModelKind::Mcgpp: {
      add_kernel_slots("xi1");
      add_kernel_slots("xi2");
      add_kernel_slots("eta1");
      add_kernel_slots("eta2");
      if (spec.optimize_shape) {
        const std::pair<const char*, CovFamily> shapes[] = {
            {"xi.shape", spec.shared}, {"eta1.shape", spec.eta1}, {"eta2.shape", spec.eta2}};
        for (const auto& [name, family] : shapes) {
          if (!has_shape(family)) continue;
          const ShapeBox box = shape_box(family);
          slots_.push_back({name, box.log_scale ? Transform::BoundedLog : Transform::Bounded,
                            box.lo, box.hi});
        }
      }
      break;
    }
    case ModelKind::Cdr:
      add_kernel_slots("theta1");
      slots_.push_back({"alpha", Transform::Identity, 0.0, 0.0});
      slots_.push_back({"log_sigma_eps2", Transform::Bounded, kLogSigmaLo, kLogSigmaHi});
      break;
    case ModelKind::Indep:
      add_kernel_slots("k1");
      add_kernel_slots("k2");
      break;
  }
}

void ParameterMap::add_kernel_slots(const std::string& prefix) {
  slots_.push_back({prefix + ".log_v2", Transform::Bounded, kLogV2Lo, kLogV2Hi});
  for (Eigen::Index i = 0; i < p_; ++i) {
    slots_.push_back(
        {prefix + ".log_a" + std::to_string(i), Transform::Bounded, kLogALo, kLogAHi});
  }
}

double ParameterMap::to_natural(const Slot& slot, double s) const {
  switch (slot.transform) {
    case Transform::Identity:
      return s;
    case Transform::Bounded:
      return slot.lo + (slot.hi - slot.lo) * sigmoid(s);
    case Transform::BoundedLog:
      return std::exp(slot.lo + (slot.hi - slot.lo) * sigmoid(s));
  }
  return s;
}

double ParameterMap::to_unconstrained(const Slot& slot, double value) const {
  if (slot.transform == Transform::Identity) return value;
  const double x = slot.transform == Transform::BoundedLog ? std::log(value) : value;
  const double u = std::clamp((x - slot.lo) / (slot.hi - slot.lo), 1e-12, 1.0 - 1e-12);
  return std::log(u / (1.0 - u));
}

RegressionCoefficients ParameterMap::beta(const Vector& x) const {
  if (x.size() != size()) throw DimensionError("ParameterMap: parameter vector length mismatch");
  return {x.head(q1_), x.segment(q1_, q2_)};
}

Hyperparams ParameterMap::theta(const Vector& x) const {
  if (x.size() != size()) throw DimensionError("ParameterMap: parameter vector length mismatch");
  std::size_t k = 0;
  auto next = [&] {
    const double value = to_natural(slots_[k], x[n_beta() + static_cast<Eigen::Index>(k)]);
    ++k;
    return value;
  };
  auto kernel = [&](CovFamily family) {
    KernelParams params;
    params.v = std::exp(0.5 * next());
    params.A = Matrix::Zero(p_, p_);
    for (Eigen::Index i = 0; i < p_; ++i) params.A(i, i) = std::exp(next());
    if (has_shape(family)) params.shape = default_shape(family);
    return params;
  };

  switch (spec_.kind) {
    case ModelKind::Mcgpp: {
      MCGPHyperparams theta;
      theta.shared_family = spec_.shared;
      theta.xi1 = kernel(spec_.shared);
      theta.xi2 = kernel(spec_.shared);
      theta.eta1 = {spec_.eta1, kernel(spec_.eta1)};
      theta.eta2 = {spec_.eta2, kernel(spec_.eta2)};
      if (spec_.optimize_shape) {
        if (has_shape(spec_.shared)) theta.xi1.shape = theta.xi2.shape = next();
        if (has_shape(spec_.eta1)) theta.eta1.params.shape = next();
        if (has_shape(spec_.eta2)) theta.eta2.params.shape = next();
      }
      return theta;
    }
    case ModelKind::Cdr: {
      CDRHyperparams theta;
      theta.theta1 = kernel(CovFamily::SquaredExponential);
      theta.alpha = next();
      theta.sigma_eps2 = std::exp(next());
      return theta;
    }
    case ModelKind::Indep: {
      IndepHyperparams theta;
      theta.k1 = kernel(CovFamily::SquaredExponential);
      theta.k2 = kernel(CovFamily::SquaredExponential);
      return theta;
    }
  }
  throw InvalidParameter("ParameterMap: unknown model kind");
}

Vector ParameterMap::pack(const RegressionCoefficients& beta, const Hyperparams& theta) const {
  if (beta.beta1.size() != q1_ || beta.beta2.size() != q2_) {
    throw DimensionError("ParameterMap: coefficient length mismatch");
  }
  Vector x(size());
  x.head(q1_) = beta.beta1;
  x.segment(q1_, q2_) = beta.beta2;
  std::size_t k = 0;
  auto put = [&](double natural) {
    x[n_beta() + static_cast<Eigen::Index>(k)] = to_unconstrained(slots_[k], natural);
    ++k;
  };
  auto put_kernel = [&](const KernelParams& params) {
    if (params.dim() != p_) throw DimensionError("ParameterMap: kernel dimension mismatch");
    put(std::log(params.v * params.v));
    for (Eigen::Index i = 0; i < p_; ++i) put(std::log(params.A(i, i)));
  };

  if (spec_.kind == ModelKind::Mcgpp) {
    const auto& t = std::get<MCGPHyperparams>(theta);
    put_kernel(t.xi1);
    put_kernel(t.xi2);
    put_kernel(t.eta1.params);
    put_kernel(t.eta2.params);
    if (spec_.optimize_shape) {
      auto shape_of = [](const KernelParams& params, CovFamily family) {
        return params.shape.value_or(default_shape(family));
      };
      if (has_shape(spec_.shared)) put(shape_of(t.xi1, spec_.shared));
      if (has_shape(spec_.eta1)) put(shape_of(t.eta1.params, spec_.eta1));
      if (has_shape(spec_.eta2)) put(shape_of(t.eta2.params, spec_.eta2));
    }
  } else if (spec_.kind == ModelKind::Cdr) {
    const auto& t = std::get<CDRHyperparams>(theta);
    put_kernel(t.theta1);
    put(t.alpha);
    put(std::log(t.sigma_eps2));
  } else {
    const auto& t = std::get<IndepHyperparams>(theta);
    put_kernel(t.k1);
    put_kernel(t.k2);
  }
  return x;
}

std::vector<std::string> ParameterMap::names() const {
  std::vector<std::string> out;
  for (Eigen::Index i = 0; i < q1_; ++i) out.push_back("beta1." + std::to_string(i));
  for (Eigen::Index i = 0; i < q2_; ++i) out.push_back("beta2." + std::to_string(i));
  for (const auto& slot : slots_) out.push_back(slot.name);
  return out;
}

}  // namespace mcgpp
