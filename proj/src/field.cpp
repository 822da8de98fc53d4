#include "excursion/field.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "excursion/error.hpp"

namespace excursion {

BoxDomain::BoxDomain(std::vector<double> lower, std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.empty() || lower_.size() != upper_.size()) {
    throw ConfigurationError("box domain needs matching, nonempty corner vectors");
  }
  for (std::size_t i = 0; i < lower_.size(); ++i) {
    if (!(lower_[i] < upper_[i]) || !std::isfinite(lower_[i]) || !std::isfinite(upper_[i])) {
      throw ConfigurationError("box domain requires lower < upper on every axis");
    }
  }
}

BoxDomain BoxDomain::unit_cube(std::size_t dim) {
  return BoxDomain(std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0));
}

double BoxDomain::lebesgue_measure() const {
  double v = 1.0;
  for (std::size_t i = 0; i < dim(); ++i) v *= width(i);
  return v;
}

bool BoxDomain::contains(std::span<const double> t) const {
  for (std::size_t i = 0; i < dim(); ++i) {
    if (t[i] < lower_[i] || t[i] > upper_[i]) return false;
  }
  return true;
}

PointSet::PointSet(std::size_t dim, std::vector<double> coords) : dim_(dim), coords_(std::move(coords)) {
  if (dim_ == 0 || coords_.size() % dim_ != 0) {
    throw ConfigurationError("point coordinates do not match the dimension");
  }
}

void PointSet::push_back(std::span<const double> p) {
  if (p.size() != dim_) throw ConfigurationError("point dimension mismatch");
  coords_.insert(coords_.end(), p.begin(), p.end());
}

void RegularityParams::validate(std::size_t dim) const {
  if (!(correlation_exponent > 0.0 && correlation_exponent <= 2.0)) {
    throw ConfigurationError("correlation exponent must lie in (0, 2]");
  }
  if (!(correlation_constant > 0.0)) throw ConfigurationError("correlation constant must be positive");
  if (!(beta0 >= 0.0) || !(beta1 > 0.0)) throw ConfigurationError("need beta0 >= 0 and beta1 > 0");
  if (beta0 + beta1 < correlation_exponent) {
    throw ConfigurationError("need beta0 + beta1 >= correlation exponent");
  }
  if (variance_type == VarianceType::UniqueMaximum) {
    if (!(variance_exponent > 0.0 && variance_exponent <= 1.0)) {
      throw ConfigurationError("variance exponent must lie in (0, 1]");
    }
    if (!(variance_constant > 0.0)) throw ConfigurationError("variance constant must be positive");
    if (sd_argmax.size() != dim) throw ConfigurationError("sd argmax must be a point of the domain");
  }
}

FieldModel::FieldModel(BoxDomain domain, ScalarFn mean, ScalarFn sd, CorrelationFn correlation,
                       RegularityParams regularity, MarginalModulus modulus)
    : domain_(std::move(domain)),
      mean_(std::move(mean)),
      sd_(std::move(sd)),
      correlation_(std::move(correlation)),
      regularity_(std::move(regularity)),
      modulus_(modulus) {
  if (!mean_ || !sd_ || !correlation_) throw ConfigurationError("field model needs mean, sd and correlation");
  regularity_.validate(domain_.dim());
}

FieldModel FieldModel::homogeneous(BoxDomain domain, double mean, double sd, CorrelationFn correlation,
                                   RegularityParams regularity) {
  if (!(sd > 0.0)) throw ConfigurationError("standard deviation must be positive");
  FieldModel model(
      std::move(domain), [mean](std::span<const double>) { return mean; },
      [sd](std::span<const double>) { return sd; }, std::move(correlation), std::move(regularity));
  model.constant_marginals_ = std::make_pair(mean, sd);
  return model;
}

double FieldModel::covariance(std::span<const double> s, std::span<const double> t) const {
  return sd_(s) * sd_(t) * correlation_(s, t);
}

FieldModel FieldModel::with_domain(BoxDomain domain) const {
  FieldModel copy = *this;
  if (domain.dim() != domain_.dim()) throw ConfigurationError("domain dimension mismatch");
  copy.domain_ = std::move(domain);
  return copy;
}

namespace {

double distance(std::span<const double> s, std::span<const double> t) {
  double acc = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double d = t[i] - s[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

double squared_distance(std::span<const double> s, std::span<const double> t) {
  double acc = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double d = t[i] - s[i];
    acc += d * d;
  }
  return acc;
}

}  // namespace

KernelKind parse_kernel_kind(const std::string& name) {
  if (name == "sqexp" || name == "squared_exponential") return KernelKind::SquaredExponential;
  if (name == "exp" || name == "exponential") return KernelKind::Exponential;
  if (name == "powexp" || name == "power_exponential") return KernelKind::PowerExponential;
  if (name == "cosine") return KernelKind::Cosine;
  throw ConfigurationError("unknown kernel '" + name + "'");
}

std::string kernel_name(KernelKind kind) {
  switch (kind) {
    case KernelKind::SquaredExponential: return "sqexp";
    case KernelKind::Exponential: return "exp";
    case KernelKind::PowerExponential: return "powexp";
    case KernelKind::Cosine: return "cosine";
  }
  return "unknown";
}

CorrelationFn make_correlation(const KernelSpec& spec) {
  if (!(spec.length > 0.0)) throw ConfigurationError("kernel length must be positive");
  const double l = spec.length;
  switch (spec.kind) {
    case KernelKind::SquaredExponential: {
      const double inv = 1.0 / (l * l);
      return [inv](std::span<const double> s, std::span<const double> t) {
        return std::exp(-squared_distance(s, t) * inv);
      };
    }
    case KernelKind::Exponential:
      return [l](std::span<const double> s, std::span<const double> t) { return std::exp(-distance(s, t) / l); };
    case KernelKind::PowerExponential: {
      if (!(spec.power > 0.0 && spec.power <= 2.0)) {
        throw ConfigurationError("power exponential kernel needs power in (0, 2]");
      }
      const double p = spec.power;
      return [l, p](std::span<const double> s, std::span<const double> t) {
        return std::exp(-std::pow(distance(s, t) / l, p));
      };
    }
    case KernelKind::Cosine:
      return [](std::span<const double> s, std::span<const double> t) { return std::cos(t[0] - s[0]); };
  }
  throw ConfigurationError("unknown kernel");
}

RegularityParams kernel_regularity(const KernelSpec& spec) {
  RegularityParams reg;
  switch (spec.kind) {
    case KernelKind::SquaredExponential:
      reg.correlation_exponent = 2.0;
      reg.correlation_constant = 1.0 / (spec.length * spec.length);
      reg.beta0 = 1.0;
      reg.beta1 = 1.0;
      break;
    case KernelKind::Exponential:
      reg.correlation_exponent = 1.0;
      reg.correlation_constant = 1.0 / spec.length;
      reg.beta0 = 0.0;
      reg.beta1 = 1.0;
      break;
    case KernelKind::PowerExponential: {
      const double p = spec.power;
      reg.correlation_exponent = p;
      reg.correlation_constant = std::pow(spec.length, -p);
      reg.beta0 = p >= 1.0 ? p - 1.0 : 0.0;
      reg.beta1 = p >= 1.0 ? 1.0 : p;
      break;
    }
    case KernelKind::Cosine:
      // 1 - cos(h) = h^2 / 2 + O(h^4)
      reg.correlation_exponent = 2.0;
      reg.correlation_constant = 0.5;
      reg.beta0 = 1.0;
      reg.beta1 = 1.0;
      break;
  }
  return reg;
}

FieldModel make_field(BoxDomain domain, const KernelSpec& kernel, const MeanSpec& mean) {
  if (kernel.kind == KernelKind::Cosine && domain.dim() != 1) {
    throw ConfigurationError("the cosine kernel is one-dimensional");
  }
  if (mean.slope.empty()) {
    return FieldModel::homogeneous(std::move(domain), mean.intercept, 1.0, make_correlation(kernel),
                                   kernel_regularity(kernel));
  }
  if (mean.slope.size() != domain.dim()) throw ConfigurationError("mean slope dimension mismatch");
  double norm = 0.0;
  for (double s : mean.slope) norm += s * s;
  MarginalModulus modulus;
  modulus.mean_constant = std::sqrt(norm);
  modulus.mean_exponent = 1.0;
  auto fn = [intercept = mean.intercept, slope = mean.slope](std::span<const double> t) {
    double v = intercept;
    for (std::size_t i = 0; i < slope.size(); ++i) v += slope[i] * t[i];
    return v;
  };
  return FieldModel(
      std::move(domain), fn, [](std::span<const double>) { return 1.0; }, make_correlation(kernel),
      kernel_regularity(kernel), modulus);
}

}  // namespace excursion
