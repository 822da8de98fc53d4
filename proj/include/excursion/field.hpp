#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace excursion {

/// Axis-aligned compact box [lower, upper] in R^d.
class BoxDomain {
 public:
  BoxDomain(std::vector<double> lower, std::vector<double> upper);

  static BoxDomain unit_cube(std::size_t dim);

  std::size_t dim() const { return lower_.size(); }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }
  double width(std::size_t axis) const { return upper_[axis] - lower_[axis]; }
  double lebesgue_measure() const;
  bool contains(std::span<const double> t) const;

 private:
  std::vector<double> lower_;
  std::vector<double> upper_;
};

/// Contiguous storage for a list of points of a common dimension.
class PointSet {
 public:
  explicit PointSet(std::size_t dim = 1) : dim_(dim) {}
  PointSet(std::size_t dim, std::vector<double> coords);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  bool empty() const { return coords_.empty(); }

  std::span<const double> operator[](std::size_t i) const { return {coords_.data() + i * dim_, dim_}; }
  std::span<double> operator[](std::size_t i) { return {coords_.data() + i * dim_, dim_}; }

  void push_back(std::span<const double> p);
  void reserve(std::size_t n) { coords_.reserve(n * dim_); }
  void resize(std::size_t n) { coords_.resize(n * dim_); }
  const std::vector<double>& coords() const { return coords_; }

 private:
  std::size_t dim_;
  std::vector<double> coords_;
};

enum class VarianceType { Constant, UniqueMaximum };

/// Local regularity of the field. The slowly varying factors are taken to
/// be constants, folded into `correlation_constant` and `variance_constant`:
///   1 - r(s, t) ~ correlation_constant * |t - s|^correlation_exponent
///   sigma(t*) - sigma(t) ~ variance_constant * |t - t*|^variance_exponent
struct RegularityParams {
  double correlation_exponent = 2.0;  // alpha_1 in (0, 2]
  double correlation_constant = 1.0;  // c_1 > 0
  double beta0 = 1.0;
  double beta1 = 1.0;
  VarianceType variance_type = VarianceType::Constant;
  double variance_exponent = 1.0;  // alpha_2 in (0, 1], UniqueMaximum only
  double variance_constant = 1.0;  // c_2 > 0, UniqueMaximum only
  std::vector<double> sd_argmax;   // t*, UniqueMaximum only

  /// Throws ConfigurationError when the parameters violate their ranges.
  void validate(std::size_t dim) const;
};

/// Hoelder moduli of the marginal mean and standard deviation,
///   |mu(s) - mu(t)|       <= mean_constant * |s - t|^mean_exponent
///   |sigma(s) - sigma(t)| <= sd_constant * |s - t|^sd_exponent.
/// Used to turn a grid maximum of the marginal tail into a true upper bound.
struct MarginalModulus {
  double mean_constant = 0.0;
  double mean_exponent = 1.0;
  double sd_constant = 0.0;
  double sd_exponent = 1.0;
};

using ScalarFn = std::function<double(std::span<const double>)>;
using CorrelationFn = std::function<double(std::span<const double>, std::span<const double>)>;

/// Gaussian random field on a box: mean, standard deviation and correlation
/// functions plus the regularity data the estimators need. Immutable once
/// built, so one instance can be shared across worker threads.
///
/// The functions must be total on R^d: design points may fall outside the
/// domain and are still simulated jointly with the rest.
class FieldModel {
 public:
  FieldModel(BoxDomain domain, ScalarFn mean, ScalarFn sd, CorrelationFn correlation,
             RegularityParams regularity, MarginalModulus modulus = {});

  /// Model with constant mean and standard deviation (fast paths apply).
  static FieldModel homogeneous(BoxDomain domain, double mean, double sd, CorrelationFn correlation,
                                RegularityParams regularity);

  const BoxDomain& domain() const { return domain_; }
  std::size_t dim() const { return domain_.dim(); }
  const RegularityParams& regularity() const { return regularity_; }
  const MarginalModulus& modulus() const { return modulus_; }

  double mean(std::span<const double> t) const { return mean_(t); }
  double sd(std::span<const double> t) const { return sd_(t); }
  double correlation(std::span<const double> s, std::span<const double> t) const { return correlation_(s, t); }
  double covariance(std::span<const double> s, std::span<const double> t) const;

  /// Set when mean and sd are known constants; enables closed forms.
  const std::optional<std::pair<double, double>>& constant_marginals() const { return constant_marginals_; }

  /// Same field restricted to (or extended over) another box.
  FieldModel with_domain(BoxDomain domain) const;

 private:
  BoxDomain domain_;
  ScalarFn mean_;
  ScalarFn sd_;
  CorrelationFn correlation_;
  RegularityParams regularity_;
  MarginalModulus modulus_;
  std::optional<std::pair<double, double>> constant_marginals_;
};

// --- built-in kernels ------------------------------------------------------

enum class KernelKind {
  SquaredExponential,  // exp(-|t-s|^2 / l^2)
  Exponential,         // exp(-|t-s| / l)
  PowerExponential,    // exp(-(|t-s| / l)^p), 0 < p <= 2
  Cosine,              // cos(t - s), d = 1
};

struct KernelSpec {
  KernelKind kind = KernelKind::SquaredExponential;
  double length = 1.0;
  double power = 2.0;  // PowerExponential only
};

/// Affine mean mu(t) = intercept + <slope, t>; an empty slope means constant.
struct MeanSpec {
  double intercept = 0.0;
  std::vector<double> slope;
};

KernelKind parse_kernel_kind(const std::string& name);
std::string kernel_name(KernelKind kind);

CorrelationFn make_correlation(const KernelSpec& spec);

/// Analytically correct regularity parameters for a built-in kernel.
RegularityParams kernel_regularity(const KernelSpec& spec);

/// Unit-variance field with a built-in kernel and an affine mean.
FieldModel make_field(BoxDomain domain, const KernelSpec& kernel, const MeanSpec& mean = {});

}  // namespace excursion
