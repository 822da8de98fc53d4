#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "excursion/field.hpp"
#include "excursion/rng.hpp"

namespace excursion {

/// Spatial scale of the excursion cluster at level b.
///   correlation = b^{2/alpha_1} c_1^{1/alpha_1}
///   variance    = b^{2/alpha_2} c_2^{1/alpha_2}  (0 for constant variance)
///   zeta        = max(correlation, variance)
struct ScaleFactors {
  double correlation = 0.0;
  double variance = 0.0;
  double zeta = 0.0;
};

ScaleFactors cluster_scale(const FieldModel& model, double b);

/// Design size ceil(lambda * eps^{-d (2/min(alpha_1, alpha_2) + 2/beta_1)})
/// that keeps the discretization bias below eps relative.
std::size_t choose_m(double eps, const FieldModel& model, double lambda = 1.0);

/// Isotropic multivariate-t density
///   k(s) = c (1 + |s|^2 / (nu scale^2))^{-(nu + d)/2}
/// with its exact normalizing constant. Tail decays like |s|^{-d-nu}.
class DesignDensity {
 public:
  DesignDensity(std::size_t dim, double dof, double scale);

  std::size_t dim() const { return dim_; }
  double dof() const { return dof_; }
  double scale() const { return scale_; }

  double density(std::span<const double> s) const;
  double log_density(std::span<const double> s) const;
  double density_at_radius(double r) const;

  /// Total mass by radial Gauss-Legendre quadrature; equals 1 up to rounding.
  double radial_mass() const;

  /// Draws an offset s ~ k: Gaussian direction times an independent
  /// chi-square mixing radius.
  void sample(Rng& rng, std::span<double> out) const;

 private:
  std::size_t dim_;
  double dof_;
  double scale_;
  double log_norm_;
};

/// Default design density used for a field of dimension d: nu = 3, scale 1
/// on the line; nu = 4, scale 0.8 in the plane and above.
DesignDensity default_design_density(std::size_t dim);

/// Design points t_i = tau + s_i / zeta with s_i ~ k, their densities
/// zeta^d k(zeta (t_i - tau)), and whether each lies in the domain.
struct DesignDraw {
  PointSet points;
  std::vector<double> density;
  std::vector<char> inside;

  std::size_t size() const { return density.size(); }
};

DesignDraw sample_design_points(std::span<const double> tau, double zeta, std::size_t m, const DesignDensity& density,
                                const BoxDomain& domain, Rng& rng);

/// Unbiased estimate of the volume of {t in T : f(t) > level}:
/// (1/m) sum I(values_i > level, t_i in T) / density_i.
double mes_hat(std::span<const double> values, double level, const DesignDraw& draw);

struct IntegrandBounds {
  double lower = 1.0;
  double upper = 1.0;
};

/// Unbiased estimate of the integral of xi over {t in T : f(t) > level}.
/// Throws IntegrandBoundsError if xi leaves its bounds at an in-domain point.
double alpha_hat(std::span<const double> xi_values, std::span<const double> f_values, double level,
                 const DesignDraw& draw, const IntegrandBounds& bounds);

}  // namespace excursion
