#include "excursion/design.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "excursion/error.hpp"
#include "excursion/quadrature.hpp"

namespace excursion {

ScaleFactors cluster_scale(const FieldModel& model, double b) {
  if (!(b > 1.0)) throw InvalidLevelError("cluster scale needs b > 1");
  const RegularityParams& reg = model.regularity();
  ScaleFactors out;
  out.correlation =
      std::pow(b, 2.0 / reg.correlation_exponent) * std::pow(reg.correlation_constant, 1.0 / reg.correlation_exponent);
  if (reg.variance_type == VarianceType::UniqueMaximum) {
    out.variance =
        std::pow(b, 2.0 / reg.variance_exponent) * std::pow(reg.variance_constant, 1.0 / reg.variance_exponent);
  }
  out.zeta = std::max(out.correlation, out.variance);
  if (!(out.zeta > 0.0) || !std::isfinite(out.zeta)) {
    throw ConfigurationError("regularity parameters give a degenerate cluster scale");
  }
  return out;
}

std::size_t choose_m(double eps, const FieldModel& model, double lambda) {
  if (!(eps > 0.0 && eps <= 1.0)) throw ConfigurationError("eps must lie in (0, 1]");
  if (!(lambda > 0.0)) throw ConfigurationError("lambda must be positive");
  const RegularityParams& reg = model.regularity();
  double alpha = reg.correlation_exponent;
  if (reg.variance_type == VarianceType::UniqueMaximum) alpha = std::min(alpha, reg.variance_exponent);
  const double exponent = static_cast<double>(model.dim()) * (2.0 / alpha + 2.0 / reg.beta1);
  const double m = std::ceil(lambda * std::pow(eps, -exponent));
  if (!(m < 1e9)) throw ConfigurationError("requested accuracy needs more than 1e9 design points");
  return std::max<std::size_t>(1, static_cast<std::size_t>(m));
}

DesignDensity::DesignDensity(std::size_t dim, double dof, double scale) : dim_(dim), dof_(dof), scale_(scale) {
  if (dim_ == 0) throw ConfigurationError("design density dimension must be positive");
  if (!(dof_ >= 3.0)) throw ConfigurationError("design density needs at least 3 degrees of freedom");
  if (!(scale_ > 0.0)) throw ConfigurationError("design density scale must be positive");
  const double d = static_cast<double>(dim_);
  log_norm_ = std::lgamma(0.5 * (dof_ + d)) - std::lgamma(0.5 * dof_) - 0.5 * d * std::log(dof_ * std::numbers::pi) -
              d * std::log(scale_);
  const double mass = radial_mass();
  if (std::abs(mass - 1.0) > 1e-8) {
    throw ConfigurationError("design density mass " + std::to_string(mass) + " differs from 1");
  }
}

double DesignDensity::density_at_radius(double r) const {
  const double d = static_cast<double>(dim_);
  return std::exp(log_norm_ - 0.5 * (dof_ + d) * std::log1p(r * r / (dof_ * scale_ * scale_)));
}

double DesignDensity::log_density(std::span<const double> s) const {
  double r2 = 0.0;
  for (double v : s) r2 += v * v;
  const double d = static_cast<double>(dim_);
  return log_norm_ - 0.5 * (dof_ + d) * std::log1p(r2 / (dof_ * scale_ * scale_));
}

double DesignDensity::density(std::span<const double> s) const { return std::exp(log_density(s)); }

double DesignDensity::radial_mass() const {
  // r = a tan(theta) maps (0, inf) onto (0, pi/2) with a smooth integrand.
  const double d = static_cast<double>(dim_);
  const double a = scale_ * std::sqrt(dof_);
  const double sphere = 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
  const GaussLegendre rule = gauss_legendre(20);
  constexpr int kCells = 16;
  const double h = 0.5 * std::numbers::pi / kCells;
  double total = 0.0;
  for (int c = 0; c < kCells; ++c) {
    const double mid = (c + 0.5) * h;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      const double theta = mid + 0.5 * h * rule.nodes[k];
      const double cs = std::cos(theta);
      const double r = a * std::tan(theta);
      total += 0.5 * h * rule.weights[k] * sphere * std::pow(r, d - 1.0) * density_at_radius(r) * a / (cs * cs);
    }
  }
  return total;
}

void DesignDensity::sample(Rng& rng, std::span<double> out) const {
  std::normal_distribution<double> normal;
  std::chi_squared_distribution<double> chi2(dof_);
  for (double& v : out) v = normal(rng);
  double w = chi2(rng);
  while (!(w > 0.0)) w = chi2(rng);
  const double factor = scale_ / std::sqrt(w / dof_);
  for (double& v : out) v *= factor;
}

DesignDensity default_design_density(std::size_t dim) {
  if (dim == 1) return DesignDensity(1, 3.0, 1.0);
  return DesignDensity(dim, 4.0, 0.8);
}

DesignDraw sample_design_points(std::span<const double> tau, double zeta, std::size_t m, const DesignDensity& density,
                                const BoxDomain& domain, Rng& rng) {
  const std::size_t d = domain.dim();
  if (m == 0) throw ConfigurationError("design needs at least one point");
  if (tau.size() != d || density.dim() != d) throw ConfigurationError("design dimension mismatch");
  if (!(zeta > 0.0)) throw ConfigurationError("cluster scale must be positive");

  DesignDraw draw;
  draw.points = PointSet(d);
  draw.points.resize(m);
  draw.density.resize(m);
  draw.inside.resize(m);
  const double jacobian = std::pow(zeta, static_cast<double>(d));
  std::vector<double> s(d);
  for (std::size_t i = 0; i < m; ++i) {
    density.sample(rng, s);
    auto t = draw.points[i];
    for (std::size_t a = 0; a < d; ++a) t[a] = tau[a] + s[a] / zeta;
    // Density from the stored point, so it matches zeta^d k(zeta (t - tau)).
    for (std::size_t a = 0; a < d; ++a) s[a] = zeta * (t[a] - tau[a]);
    draw.density[i] = jacobian * density.density(s);
    draw.inside[i] = domain.contains(t) ? 1 : 0;
  }
  return draw;
}

double mes_hat(std::span<const double> values, double level, const DesignDraw& draw) {
  if (values.size() != draw.size()) throw ConfigurationError("field values do not match the design");
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (draw.inside[i] && values[i] > level) acc += 1.0 / draw.density[i];
  }
  return acc / static_cast<double>(values.size());
}

double alpha_hat(std::span<const double> xi_values, std::span<const double> f_values, double level,
                 const DesignDraw& draw, const IntegrandBounds& bounds) {
  if (xi_values.size() != draw.size() || f_values.size() != draw.size()) {
    throw ConfigurationError("integrand values do not match the design");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < f_values.size(); ++i) {
    if (!draw.inside[i]) continue;
    const double xi = xi_values[i];
    if (!(xi >= bounds.lower && xi <= bounds.upper)) {
      throw IntegrandBoundsError("integrand value " + std::to_string(xi) + " outside its declared bounds");
    }
    if (f_values[i] > level) acc += xi / draw.density[i];
  }
  return acc / static_cast<double>(f_values.size());
}

}  // namespace excursion
